#pragma once

// Command-line front end. run_cli() is the whole program; tools/pirlab.cpp
// only forwards argv to it.
//
// Exit codes: 0 success, 2 configuration error, 3 correctness failure,
// 4 failed audit.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pirlab/audit.hpp"
#include "pirlab/capacity.hpp"
#include "pirlab/databank.hpp"
#include "pirlab/error.hpp"
#include "pirlab/pir.hpp"
#include "pirlab/pruw.hpp"
#include "pirlab/sparsify.hpp"
#include "pirlab/spir.hpp"

namespace pirlab::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kCorrectnessFailure = 3, kAuditFailure = 4 };

struct RunConfig {
  std::string scheme;
  std::size_t N = 2;
  std::size_t K = 2;
  std::size_t L = 0;  // 0: one subpacket (8 for PRUW)
  std::size_t M = 3;
  std::uint64_t q = 3;
  std::size_t theta = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  bool expected = false;
};

namespace detail {

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

inline std::string csv(const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != 0) text += ',';
      text += csv_field(row[i]);
    }
    text += "\r\n";
  }
  return text;
}

inline std::string rational_with_decimal(const Rational& r) { return to_string(r) + " (" + to_decimal(r) + ")"; }

inline void check_format(const std::string& format) {
  if (format != "json" && format != "csv") throw InvalidArgument("format must be json or csv");
}

inline const std::set<std::string>& run_schemes() {
  static const std::set<std::string> s = {"cgks", "residual", "sunjafar", "tian", "leaky", "spir-det", "spir-prob", "pruw"};
  return s;
}

// Fills the default L and rejects parameters outside the scheme's grid.
inline void validate(RunConfig& c) {
  if (!run_schemes().count(c.scheme)) throw UnknownScheme(c.scheme);
  check_format(c.format);
  const PrimeField field(c.q);
  (void)field;
  if (c.scheme == "pruw") {
    if (c.N < 4) throw InvalidArgument("pruw needs N >= 4");
    if (c.L == 0) c.L = 8;
    if (c.theta < 1 || c.theta > c.M) throw InvalidArgument("theta must be in [1, M]");
    return;
  }
  if (c.K < 1) throw InvalidArgument("K must be >= 1");
  if (c.theta < 1 || c.theta > c.K) throw InvalidArgument("theta must be in [1, K]");
  if (c.N < 2) throw InvalidArgument(c.scheme + " needs N >= 2");
  std::size_t unit = c.N - 1;
  if (c.scheme == "cgks") {
    if (c.N != 2) throw InvalidArgument("cgks is defined for N = 2 only");
    unit = 1;
    if (c.L != 0 && c.L != 1) throw InvalidArgument("cgks retrieves single-symbol messages (L = 1)");
  } else if (c.scheme == "leaky") {
    if (c.N != 2 || c.K != 2) throw InvalidArgument("leaky is defined for N = 2, K = 2 only");
    unit = 1;
  } else if (c.scheme == "sunjafar") {
    if (c.K > 8 || pirlab::detail::ipow(c.N, c.K) > 1'000'000) throw InvalidArgument("sunjafar subpacket N^K too large");
    unit = pirlab::detail::ipow(c.N, c.K);
  }
  if (c.L == 0) c.L = unit;
  if (c.L % unit != 0) throw InvalidArgument("L must be a multiple of " + std::to_string(unit));
}

inline int run_pruw(const RunConfig& c, std::ostream& out) {
  const PrimeField field(c.q);
  const auto frame = pruw::EvaluationFrame::standard(field, c.N, c.M, c.L);
  SeededSource models_src(c.seed, "run/models");
  SeededSource user(c.seed, "run/pruw/user");
  std::vector<SymbolVector> models;
  for (std::size_t k = 0; k < c.M; ++k) models.push_back(sample_vector(field, c.L, models_src));
  const SymbolVector delta = sample_vector(field, c.L, models_src);
  const auto rep = pruw::pruw_roundtrip(frame, models, c.theta, delta, user);
  const bool ok = rep.read_matches && rep.write_matches && rep.form_preserved;

  nlohmann::ordered_json j;
  j["scheme"] = "pruw";
  j["N"] = c.N;
  j["M"] = c.M;
  j["L"] = c.L;
  j["q"] = std::to_string(c.q);
  j["theta"] = c.theta;
  j["reading_cost"] = to_string(rep.reading_cost);
  j["writing_cost"] = to_string(rep.writing_cost);
  j["read_matches"] = rep.read_matches;
  j["write_matches"] = rep.write_matches;
  j["form_preserved"] = rep.form_preserved;
  if (c.format == "json") {
    emit(j.dump(2) + "\n", c.out, out);
  } else {
    emit(csv({{"scheme", "N", "M", "L", "q", "theta", "reading_cost", "writing_cost", "ok"},
              {"pruw", std::to_string(c.N), std::to_string(c.M), std::to_string(c.L), std::to_string(c.q),
               std::to_string(c.theta), to_string(rep.reading_cost), to_string(rep.writing_cost), ok ? "1" : "0"}}),
         c.out, out);
  }
  return ok ? kOk : kCorrectnessFailure;
}

inline std::vector<std::vector<std::size_t>> all_keys(std::size_t N, std::size_t K) {
  std::vector<std::vector<std::size_t>> keys;
  const std::size_t count = pirlab::detail::ipow(N, K - 1);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<std::size_t> key;
    std::size_t v = code;
    for (std::size_t i = 0; i + 1 < K; ++i) {
      key.push_back(v % N);
      v /= N;
    }
    keys.push_back(std::move(key));
  }
  return keys;
}

}  // namespace detail

/// One protocol round; the report follows the transcript schema plus
/// "capacity" and "decoded". With `expected`, "rate" is the exact average
/// over the scheme's randomness and the sampled round's rate moves to
/// "sampled_rate".
inline int cmd_run(RunConfig c, std::ostream& out) {
  detail::validate(c);
  if (c.scheme == "pruw") return detail::run_pruw(c, out);

  const PrimeField field(c.q);
  SeededSource messages(c.seed, "run/messages");
  SeededSource user(c.seed, "run/" + c.scheme + "/user");
  SeededSource pool_src(c.seed, "run/pool");
  const auto store = MessageStore::random(field, c.K, c.L, messages);
  auto dbs = replicate(store, c.N);

  RoundResult r;
  Rational capacity;
  std::optional<Rational> expected;
  if (c.scheme == "cgks") {
    r = cgks_round(dbs, c.theta, user);
    capacity = capacity::c_spir(2);
  } else if (c.scheme == "residual") {
    r = residual_round(dbs, c.theta, user);
    capacity = capacity::c_spir(c.N);
  } else if (c.scheme == "spir-det") {
    auto pool = CommonRandomnessPool::random(field, c.L / (c.N - 1), pool_src);
    r = spir_round_deterministic(dbs, c.theta, pool, user);
    capacity = capacity::c_spir(c.N);
  } else if (c.scheme == "sunjafar") {
    r = sunjafar_round(dbs, sunjafar_plan(c.N, c.K, c.theta, user));
    capacity = capacity::c_pir(c.N, c.K);
  } else if (c.scheme == "tian") {
    r = tian_round(dbs, c.theta, tian_random_key(c.N, c.K, user));
    capacity = capacity::c_pir(c.N, c.K);
    expected = tian_enumerated_rate(store, c.N, c.theta);
  } else if (c.scheme == "spir-prob") {
    const std::size_t per_round = c.L / (c.N - 1);
    auto pool = CommonRandomnessPool::random(field, per_round, pool_src);
    r = spir_round_probabilistic(dbs, c.theta, pool, tian_random_key(c.N, c.K, user));
    capacity = capacity::c_spir(c.N);
    BigInt down = 0;
    const auto keys = detail::all_keys(c.N, c.K);
    for (const auto& key : keys) {
      auto fresh = replicate(store, c.N);
      auto p = CommonRandomnessPool::random(field, per_round, pool_src);
      down += spir_round_probabilistic(fresh, c.theta, p, key).transcript.downloaded_symbols();
    }
    expected = Rational(BigInt(c.L) * keys.size(), down);
  } else {
    r = leaky_round(dbs, c.theta, user);
    capacity = capacity::c_pir(2, 2);
    expected = leaky_expected_rate(store, c.theta);
  }

  const bool decoded = r.decoded == store.message(c.theta);
  const auto cost = empirical_rate(r.transcript);
  const Rational reference = expected ? *expected : cost.rate;
  const bool rate_ok = reference == capacity;

  if (c.format == "json") {
    auto j = to_json(r.transcript);
    if (c.expected) {
      j["rate"] = to_string(reference);
      j["sampled_rate"] = to_string(cost.rate);
    } else if (expected) {
      j["expected_rate"] = to_string(*expected);
    }
    j["capacity"] = to_string(capacity);
    if (cost.pool_symbols_per_symbol) j["pool_symbols_per_symbol"] = to_string(*cost.pool_symbols_per_symbol);
    j["decoded"] = decoded;
    detail::emit(j.dump(2) + "\n", c.out, out);
  } else {
    std::vector<std::vector<std::string>> rows = {
        {"scheme", "N", "K", "L", "q", "theta", "n", "uploaded_symbols", "downloaded_symbols", "rate"}};
    const std::string rate = to_string(c.expected ? reference : cost.rate);
    for (const auto& ex : r.transcript.per_db)
      rows.push_back({c.scheme, std::to_string(c.N), std::to_string(c.K), std::to_string(c.L), std::to_string(c.q),
                      std::to_string(c.theta), std::to_string(ex.n), std::to_string(ex.uploaded_symbols),
                      std::to_string(ex.downloaded_symbols), rate});
    detail::emit(detail::csv(rows), c.out, out);
  }
  return decoded && rate_ok ? kOk : kCorrectnessFailure;
}

struct AuditConfig {
  std::string scheme;
  std::size_t N = 2;
  std::size_t K = 2;
  std::size_t M = 3;
  std::size_t L = 5;
  std::size_t s = 2;
  std::uint64_t q = 3;
  std::string out;
  std::string format = "json";
};

/// Runs every applicable check. The report has the audit schema with
/// check "all" and the largest TV, followed by the individual checks.
inline int cmd_audit(const AuditConfig& c, std::ostream& out) {
  static const std::set<std::string> known = {"cgks", "residual", "sunjafar", "tian", "leaky", "spir-det",
                                              "spir-prob", "pruw", "sparsify", "fixture-leaky-theta"};
  if (!known.count(c.scheme)) throw UnknownScheme(c.scheme);
  detail::check_format(c.format);
  audit::SchemeParams p{c.N, c.K, c.q, c.M, c.L, c.s};
  if (c.scheme == "cgks" && p.N != 2) throw InvalidArgument("cgks is defined for N = 2 only");
  if (c.scheme == "leaky" && (p.N != 2 || p.K != 2)) throw InvalidArgument("leaky is defined for N = 2, K = 2 only");
  if (c.scheme == "sparsify" && (p.s > p.L || p.L > 8)) throw InvalidArgument("sparsify audit needs s <= L <= 8");
  const auto checks = audit::audit_scheme(c.scheme, p, {});

  bool pass = true;
  Rational worst = 0;
  for (const auto& ch : checks) {
    pass = pass && ch.pass;
    worst = std::max(worst, ch.tv);
  }
  if (c.format == "json") {
    nlohmann::ordered_json j = audit::to_json(c.scheme, audit::CheckResult{"all", pass, worst, checks.front().params});
    auto arr = nlohmann::ordered_json::array();
    for (const auto& ch : checks) arr.push_back(audit::to_json(c.scheme, ch));
    j["checks"] = std::move(arr);
    detail::emit(j.dump(2) + "\n", c.out, out);
  } else {
    std::vector<std::vector<std::string>> rows = {{"scheme", "check", "result", "tv"}};
    for (const auto& ch : checks) rows.push_back({c.scheme, ch.check, ch.pass ? "pass" : "fail", to_string(ch.tv)});
    detail::emit(detail::csv(rows), c.out, out);
  }
  return pass ? kOk : kAuditFailure;
}

struct LeakageConfig {
  std::size_t L = 12;
  std::vector<std::size_t> B;  // empty: every B in [1, L]
  std::optional<std::size_t> s;
  std::string r = "0.25";
  int precision = 3;
  std::string out;
};

/// CSV rows (B, single_stage_bits, two_stage_bits, ragged).
inline int cmd_leakage(const LeakageConfig& c, std::ostream& out) {
  std::size_t s = 0;
  if (c.s) {
    s = *c.s;
  } else {
    const Rational want = parse_rational(c.r) * c.L + Rational(1, 2);
    if (want < Rational(1, 2) || want > c.L + Rational(1, 2)) throw InvalidArgument("r must lie in [0, 1]");
    s = static_cast<std::size_t>((boost::multiprecision::numerator(want) / boost::multiprecision::denominator(want))
                                     .convert_to<unsigned long long>());
  }
  std::vector<std::size_t> segments = c.B;
  if (segments.empty())
    for (std::size_t b = 1; b <= c.L; ++b) segments.push_back(b);

  std::vector<std::vector<std::string>> rows = {{"B", "single_stage_bits", "two_stage_bits", "ragged"}};
  bool monotone = true;
  for (auto b : segments) {
    const double single = sparsify::leakage_entropy(c.L, b, s, false);
    const double two = sparsify::leakage_entropy(c.L, b, s, true);
    monotone = monotone && two <= single + 1e-12;
    std::ostringstream a;
    std::ostringstream t;
    a << std::fixed << std::setprecision(c.precision) << single;
    t << std::fixed << std::setprecision(c.precision) << two;
    rows.push_back({std::to_string(b), a.str(), t.str(), sparsify::SegmentationPlan::make(c.L, b).ragged() ? "1" : "0"});
  }
  if (!monotone) return kCorrectnessFailure;
  detail::emit(detail::csv(rows), c.out, out);
  return kOk;
}

struct DemoConfig {
  std::size_t N = 4;
  std::size_t M = 3;
  std::size_t L = 8;
  std::uint64_t q = 97;
  std::size_t theta = 2;
  std::uint64_t seed = 1;
  std::string out;
  std::string shares_out;
};

/// PRUW roundtrip report; optionally the initial share tables as JSON.
inline int cmd_pruw_demo(const DemoConfig& c, std::ostream& out) {
  RunConfig rc;
  rc.scheme = "pruw";
  rc.N = c.N;
  rc.M = c.M;
  rc.L = c.L;
  rc.q = c.q;
  rc.theta = c.theta;
  rc.seed = c.seed;
  rc.out = c.out;
  detail::validate(rc);
  if (!c.shares_out.empty()) {
    const PrimeField field(c.q);
    const auto frame = pruw::EvaluationFrame::standard(field, c.N, c.M, c.L);
    SeededSource models_src(c.seed, "run/models");
    SeededSource noise(c.seed, "pruw-demo/shares");
    std::vector<SymbolVector> models;
    for (std::size_t k = 0; k < c.M; ++k) models.push_back(sample_vector(field, c.L, models_src));
    detail::emit(pruw::shares_to_json(frame, pruw::pruw_init(models, frame, noise)).dump(2) + "\n", c.shares_out, out);
  }
  return detail::run_pruw(rc, out);
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pirlab: private information retrieval protocol laboratory"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig run;
  auto* run_cmd = app.add_subcommand("run", "Run one protocol round and report its transcript and rate");
  run_cmd->add_option("--scheme", run.scheme, "cgks|residual|sunjafar|tian|leaky|spir-det|spir-prob|pruw")->required();
  run_cmd->add_option("--n", run.N, "Number of databases");
  run_cmd->add_option("--k", run.K, "Number of messages");
  run_cmd->add_option("--l", run.L, "Symbols per message (default: one subpacket)");
  run_cmd->add_option("--m", run.M, "PRUW submodels");
  run_cmd->add_option("--q", run.q, "Field modulus");
  run_cmd->add_option("--theta", run.theta, "Desired index (1-based)");
  run_cmd->add_option("--seed", run.seed, "Seed for every random stream");
  run_cmd->add_option("--out", run.out, "Report path (default stdout)");
  run_cmd->add_option("--format", run.format, "json|csv");
  run_cmd->add_flag("--expected", run.expected, "Report the exact expected rate");

  AuditConfig aud;
  auto* audit_cmd = app.add_subcommand("audit", "Exact privacy audits by enumeration");
  audit_cmd->add_option("--scheme", aud.scheme, "Scheme, sparsify or fixture-leaky-theta")->required();
  audit_cmd->add_option("--n", aud.N, "Number of databases");
  audit_cmd->add_option("--k", aud.K, "Number of messages");
  audit_cmd->add_option("--m", aud.M, "PRUW submodels");
  audit_cmd->add_option("--l", aud.L, "Sparsification model size");
  audit_cmd->add_option("--s", aud.s, "Sparsification update count");
  audit_cmd->add_option("--q", aud.q, "Field modulus");
  audit_cmd->add_option("--out", aud.out, "Report path (default stdout)");
  audit_cmd->add_option("--format", aud.format, "json|csv");

  auto* cap_cmd = app.add_subcommand("capacity", "Closed-form capacities");
  cap_cmd->require_subcommand(1);
  std::size_t cn = 2;
  std::size_t ck = 1;
  std::size_t cm = 1;
  std::size_t ct = 1;
  std::size_t cb = 0;
  std::size_t cp = 1;
  std::string dr = "0";
  std::string dw = "0";
  std::string c1 = "1";
  std::string c2 = "1";
  auto add_nk = [&](CLI::App* sub) {
    sub->add_option("--n", cn, "Number of databases")->required();
    sub->add_option("--k", ck, "Number of messages")->required();
  };
  auto* pir_cmd = cap_cmd->add_subcommand("pir", "Replicated PIR");
  add_nk(pir_cmd);
  auto* spir_cmd = cap_cmd->add_subcommand("spir", "Symmetric PIR");
  spir_cmd->add_option("--n", cn, "Number of databases")->required();
  auto* coded_cmd = cap_cmd->add_subcommand("coded", "MDS-coded PIR");
  add_nk(coded_cmd);
  coded_cmd->add_option("--m", cm, "Code dimension")->required();
  auto* coll_cmd = cap_cmd->add_subcommand("colluding", "T-colluding PIR");
  add_nk(coll_cmd);
  coll_cmd->add_option("--t", ct, "Collusion size")->required();
  auto* byz_cmd = cap_cmd->add_subcommand("byzantine", "Byzantine PIR");
  add_nk(byz_cmd);
  byz_cmd->add_option("--t", ct, "Collusion size");
  byz_cmd->add_option("--b", cb, "Byzantine databases")->required();
  auto* mm_cmd = cap_cmd->add_subcommand("mmpir", "Multi-message PIR");
  add_nk(mm_cmd);
  mm_cmd->add_option("--p", cp, "Messages retrieved at once")->required();
  auto* rd_cmd = cap_cmd->add_subcommand("rd", "Rate-distortion read/write costs");
  rd_cmd->add_option("--dr", dr, "Reading distortion budget");
  rd_cmd->add_option("--dw", dw, "Writing distortion budget");
  rd_cmd->add_option("--c1", c1, "Baseline reading cost");
  rd_cmd->add_option("--c2", c2, "Baseline writing cost");

  LeakageConfig leak;
  std::size_t leak_s = 0;
  auto* leak_cmd = app.add_subcommand("leakage", "Segmentation leakage entropies as CSV");
  leak_cmd->add_option("--l", leak.L, "Model size (<= 24)");
  leak_cmd->add_option("--b", leak.B, "Segment counts (default: 1..L)")->delimiter(',');
  auto* s_opt = leak_cmd->add_option("--s", leak_s, "Number of sparse updates");
  leak_cmd->add_option("--r", leak.r, "Sparsification fraction; s = round(r L)");
  leak_cmd->add_option("--precision", leak.precision, "Decimals in the output");
  leak_cmd->add_option("--out", leak.out, "CSV path (default stdout)");

  DemoConfig demo;
  auto* demo_cmd = app.add_subcommand("pruw-demo", "PRUW read-write roundtrip against a plaintext shadow");
  demo_cmd->add_option("--n", demo.N, "Number of databases (>= 4)");
  demo_cmd->add_option("--m", demo.M, "Submodels");
  demo_cmd->add_option("--l", demo.L, "Symbols per submodel");
  demo_cmd->add_option("--q", demo.q, "Field modulus");
  demo_cmd->add_option("--theta", demo.theta, "Submodel to update");
  demo_cmd->add_option("--seed", demo.seed, "Seed");
  demo_cmd->add_option("--out", demo.out, "Report path (default stdout)");
  demo_cmd->add_option("--shares-out", demo.shares_out, "Write the initial share tables here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run, out);
    if (audit_cmd->parsed()) return cmd_audit(aud, out);
    if (leak_cmd->parsed()) {
      if (s_opt->count() > 0) leak.s = leak_s;
      return cmd_leakage(leak, out);
    }
    if (demo_cmd->parsed()) return cmd_pruw_demo(demo, out);
    if (rd_cmd->parsed()) {
      const auto costs = capacity::rd_costs(parse_rational(dr), parse_rational(dw), parse_rational(c1), parse_rational(c2));
      out << "C_R=" << to_decimal(costs.reading) << " C_W=" << to_decimal(costs.writing) << "\n";
      return kOk;
    }
    Rational value;
    if (pir_cmd->parsed()) value = capacity::c_pir(cn, ck);
    if (spir_cmd->parsed()) value = capacity::c_spir(cn);
    if (coded_cmd->parsed()) value = capacity::c_coded(cn, ck, cm);
    if (coll_cmd->parsed()) value = capacity::c_colluding(cn, ck, ct);
    if (byz_cmd->parsed()) value = capacity::c_byzantine(cn, ck, ct, cb);
    if (mm_cmd->parsed()) {
      try {
        value = capacity::c_mmpir(cn, ck, cp);
      } catch (const UncharacterizedRegime& e) {
        out << e.what() << "\n";
        return kOk;
      }
    }
    out << detail::rational_with_decimal(value) << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace pirlab::cli
