#include "umlab/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "umlab/acceptance/acceptance.hpp"
#include "umlab/harness/experiment.hpp"
#include "umlab/primitives/error.hpp"

namespace umlab::cli {

namespace {

struct Flags {
  std::string protocol;
  std::string strategy;
  std::string group = "toy256";
  std::string kem_mode = "det";
  std::string policy = "figure";
  std::string point = "default";
  unsigned ne = 16;
  std::vector<unsigned> ne_list;
  std::uint32_t trials = 100;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string format = "json";
  std::string transcript;
  std::string replay_path;
  std::uint64_t replay_seed = 0;
  std::vector<int> only;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* protocol_opt = nullptr;
  CLI::Option* replay_seed_opt = nullptr;
};

void add_experiment_flags(CLI::App& sub, Flags& f, bool with_ne) {
  f.protocol_opt = sub.add_option("--protocol", f.protocol, "protocol name (see list-protocols)");
  if (with_ne) sub.add_option("--ne", f.ne, "entropy width in bits")->capture_default_str();
  sub.add_option("--trials", f.trials, "number of trials")->capture_default_str();
  sub.add_option("--seed", f.seed, "master seed")->capture_default_str();
  sub.add_option("--group", f.group, "toy256 or modp2048")->capture_default_str();
  sub.add_option("--kem-mode", f.kem_mode, "det or prob")->capture_default_str();
  sub.add_option("--policy", f.policy, "entropy policy: figure, key-only, with-identity, strip-identity")
      ->capture_default_str();
  sub.add_option("--threads", f.threads, "worker threads")->capture_default_str();
  sub.add_option("--out", f.out, "report path, '-' for standard output");
  sub.add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

void add_attack_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--strategy", f.strategy, "attack strategy")->required();
  f.budget_opt = sub.add_option("--budget", f.budget, "collision-loop budget (default 2^(ne+4))");
  sub.add_option("--forge-point", f.point, "random-forge target on kem3commit: public-key or ciphertext")
      ->capture_default_str();
}

// Each strategy has one natural target; --protocol overrides it.
proto::ProtocolKind default_target(attacks::StrategyKind s) {
  using attacks::StrategyKind;
  switch (s) {
    case StrategyKind::Kex2EntropyCollision: return proto::ProtocolKind::Kex2;
    case StrategyKind::KemSameKey:
    case StrategyKind::Kem2Replica:
    case StrategyKind::Kem2Combined: return proto::ProtocolKind::Kem2;
    case StrategyKind::RandomForge: return proto::ProtocolKind::Kex3;
    case StrategyKind::Redirect: return proto::ProtocolKind::MtAuth;
  }
  return proto::ProtocolKind::Kex3;
}

harness::ExperimentConfig to_config(const Flags& f, bool attack) {
  harness::ExperimentConfig c;
  if (attack) {
    c.strategy = attacks::parse_strategy(f.strategy);
    c.protocol = f.protocol.empty() ? default_target(*c.strategy) : proto::parse_protocol(f.protocol);
    c.point = attacks::parse_forge_point(f.point);
    if (f.budget_opt && f.budget_opt->count() > 0) c.budget = f.budget;
  } else {
    if (f.protocol.empty()) throw ConfigError("--protocol is required");
    c.protocol = proto::parse_protocol(f.protocol);
  }
  c.group = f.group;
  GroupParams::by_name(c.group);
  c.kem_mode = parse_kem_mode(f.kem_mode);
  c.policy = proto::parse_policy(f.policy);
  c.n_e = f.ne;
  c.trials = f.trials;
  c.seed = f.seed;
  c.threads = f.threads;
  return c;
}

std::string summary_line(const harness::TrialSummary& s) {
  std::ostringstream os;
  const auto& c = s.config;
  os << proto::to_string(c.protocol) << ' ' << (c.strategy ? attacks::to_string(*c.strategy) : "honest");
  if (c.point != attacks::ForgePoint::Default) os << '/' << attacks::to_string(c.point);
  os << " n_e=" << c.n_e << " trials=" << s.trials << " successes=" << s.successes << std::fixed
     << std::setprecision(6) << " rate=" << s.rate << " wilson95=[" << s.wilson.lo << ", " << s.wilson.hi << "]"
     << " bound=" << s.bound;
  if (c.strategy) os << " mean_iter=" << std::setprecision(1) << s.mean_iterations << " max_iter=" << s.max_iterations;
  os << " verdict=" << harness::to_string(s.verdict);
  if (s.expected_demonstration && s.verdict == harness::Verdict::ViolatesBound) os << " (expected: undefended)";
  return os.str();
}

void print_records(std::ostream& out, const model::World& w) {
  for (const auto& r : w.records()) {
    out << r.self.name() << ' ' << proto::to_string(r.role) << ' ' << model::to_string(r.status)
        << " kappa=" << (r.key ? to_hex(view(r.key->bytes)) : "-");
    for (const auto& [name, e] : r.entropies) out << ' ' << name << '=' << e.hex();
    out << '\n';
  }
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw ConfigError("write to " + path + " failed");
}

Bytes read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(f), {});
}

int report(const std::vector<harness::TrialSummary>& sums, const Flags& f, const std::string& command,
           std::ostream& out) {
  const bool to_stdout = f.out == "-";
  if (!to_stdout)
    for (const auto& s : sums) out << summary_line(s) << '\n';
  if (!f.out.empty()) {
    const std::string body = f.format == "csv" ? harness::to_csv(sums) : harness::to_json(sums, command);
    if (to_stdout)
      out << body;
    else
      write_file(f.out, body);
  }
  const bool gate = std::any_of(sums.begin(), sums.end(), [](const auto& s) { return s.gate_failure(); });
  return gate ? kExitBoundViolated : kExitOk;
}

int list_protocols(std::ostream& out) {
  out << std::left << std::setw(12) << "name" << std::setw(10) << "messages" << std::setw(13) << "first"
      << std::setw(10) << "defended" << "gates\n";
  for (auto k : proto::all_protocols()) {
    const auto& i = proto::info(k);
    std::string gates;
    for (const auto& g : i.gates) gates += (gates.empty() ? "" : ",") + g.first;
    out << std::setw(12) << i.cli_name << std::setw(10) << i.messages << std::setw(13)
        << proto::to_string(i.first_sender) << std::setw(10) << (i.defended ? "yes" : "no") << gates << '\n';
  }
  return kExitOk;
}

int replay(const Flags& f, std::ostream& out, std::ostream& err) {
  const Bytes data = read_file(f.replay_path);
  const auto parsed = model::parse_transcript(data);
  std::optional<std::uint64_t> seed;
  if (f.replay_seed_opt->count() > 0) seed = f.replay_seed;
  const model::World w = model::replay_transcript(data, seed);
  print_records(out, w);
  const auto recs = w.records();
  bool same = recs.size() == parsed.record_blobs.size();
  for (std::size_t i = 0; same && i < recs.size(); ++i) same = recs[i].serialize() == parsed.record_blobs[i];
  if (!same) {
    err << "replay diverged from the recorded sessions\n";
    return kExitConfig;
  }
  out << "replay matches the recorded sessions\n";
  return kExitOk;
}

std::string joined(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) s += (s.empty() ? "" : " ") + a;
  return s;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"umlab: protocol lab for entropy-verified key exchange", "umlab"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Flags f;

  auto* list = app.add_subcommand("list-protocols", "show the protocol table");
  auto* run = app.add_subcommand("run", "honest runs in the authenticated-links model");
  add_experiment_flags(*run, f, true);
  run->add_option("--transcript", f.transcript, "export the transcript of trial 0 to this path");
  auto* attack = app.add_subcommand("attack", "run an attack strategy in the unauthenticated model");
  add_experiment_flags(*attack, f, true);
  add_attack_flags(*attack, f);
  auto* sweep = app.add_subcommand("sweep", "one attack experiment per entropy width");
  add_experiment_flags(*sweep, f, false);
  add_attack_flags(*sweep, f);
  sweep->add_option("--ne", f.ne_list, "entropy widths, comma separated")->delimiter(',')->required();
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--only", f.only, "criterion numbers, comma separated")->delimiter(',');
  auto* rep = app.add_subcommand("replay", "re-execute an exported transcript");
  rep->add_option("transcript", f.replay_path, "transcript file")->required();
  f.replay_seed_opt = rep->add_option("--seed", f.replay_seed, "override the world seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const std::string command = joined(args);
    if (*list) return list_protocols(out);
    if (*run) {
      const auto cfg = to_config(f, false);
      const auto s = harness::run_experiment(cfg);
      const auto w = harness::honest_world(cfg, 0);
      if (f.out != "-") {
        out << "trial 0:\n";
        print_records(out, w);
      }
      if (!f.transcript.empty()) {
        const Bytes t = w.export_transcript();
        write_file(f.transcript, std::string_view(reinterpret_cast<const char*>(t.data()), t.size()));
      }
      return report({s}, f, command, out);
    }
    if (*attack) return report({harness::run_experiment(to_config(f, true))}, f, command, out);
    if (*sweep) return report(harness::sweep(to_config(f, true), f.ne_list), f, command, out);
    if (*selftest) {
      const auto ids = f.only.empty() ? acceptance::all_criteria() : f.only;
      for (int id : ids) acceptance::criterion_name(id);
      const int fails = acceptance::run_suite(ids, cli_main, out);
      return fails == 0 ? kExitOk : kExitConfig;
    }
    if (*rep) return replay(f, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace umlab::cli
