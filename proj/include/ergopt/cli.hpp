#pragma once

// Batch front-end: reads a JSON system spec, runs one command, prints JSON.
// Needs the vendored CLI11 and nlohmann headers on the include path.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ergopt/error.hpp"
#include "ergopt/optimizers.hpp"
#include "ergopt/orbit.hpp"
#include "ergopt/potential.hpp"
#include "ergopt/scalar.hpp"
#include "ergopt/sft.hpp"
#include "ergopt/suspension.hpp"

namespace ergopt::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSpecFormat = "ergopt-spec/1";

enum ExitCode : int { kOk = 0, kFailure = 1, kParse = 2, kInfeasible = 3, kNumerical = 4 };

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyAlphabet:
    case ErrorKind::StrandedSymbol:
    case ErrorKind::InvalidWord:
    case ErrorKind::WordTooShort:
    case ErrorKind::IncompleteTable:
    case ErrorKind::DenominatorViolated:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
      return kParse;
    case ErrorKind::Infeasible:
    case ErrorKind::NotMixing:
    case ErrorKind::TargetsIndistinguishable:
    case ErrorKind::HypothesisFails:
      return kInfeasible;
    case ErrorKind::BudgetExceeded:
    case ErrorKind::NoApproximantAvailable:
    case ErrorKind::MaxEffortExceeded:
    case ErrorKind::NumericallyUnstable:
    case ErrorKind::UnimodalityViolation:
    case ErrorKind::HorizonTooLarge:
      return kNumerical;
  }
  return kFailure;
}

// ---------------------------------------------------------------------------
// Spec file
// ---------------------------------------------------------------------------

struct SystemSpec {
  Sft sft;
  nlohmann::json potentials = nlohmann::json::object();
  nlohmann::json suspension;  // null when absent
  nlohmann::json run = nlohmann::json::object();
};

inline Rational parse_value(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return parse_rational(v.dump());
  throw Error(ErrorKind::ParseError, "expected a number or a \"p/q\" string, got " + v.dump());
}

inline Word parse_word(const nlohmann::json& v) {
  if (!v.is_array()) throw Error(ErrorKind::ParseError, "expected an array of symbols, got " + v.dump());
  Word w;
  for (const auto& s : v) {
    if (!s.is_number_unsigned()) throw Error(ErrorKind::ParseError, "symbols are nonnegative integers");
    w.push_back(s.get<Symbol>());
  }
  return w;
}

inline SystemSpec parse_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "spec must be a JSON object");
  if (doc.value("format", "") != kSpecFormat)
    throw Error(ErrorKind::ParseError, std::string("spec \"format\" must be \"") + kSpecFormat + "\"");
  if (!doc.contains("sft")) throw Error(ErrorKind::ParseError, "missing \"sft\" section");
  const auto& s = doc["sft"];
  if (!s.contains("alphabet") || !s["alphabet"].is_number_unsigned())
    throw Error(ErrorKind::ParseError, "sft.alphabet must be a nonnegative integer");
  const auto n = s["alphabet"].get<std::size_t>();
  std::vector<std::pair<Symbol, Symbol>> pairs;
  if (s.contains("allowed")) {
    for (const auto& p : s["allowed"]) {
      const Word w = parse_word(p);
      if (w.size() != 2) throw Error(ErrorKind::ParseError, "allowed pairs have two symbols");
      pairs.emplace_back(w[0], w[1]);
    }
  } else {
    for (Symbol a = 0; a < n; ++a)
      for (Symbol b = 0; b < n; ++b) pairs.emplace_back(a, b);
  }
  SystemSpec spec;
  spec.sft = validate_sft(n, pairs);
  if (doc.contains("potentials")) spec.potentials = doc["potentials"];
  if (doc.contains("suspension")) spec.suspension = doc["suspension"];
  if (doc.contains("run")) spec.run = doc["run"];
  if (!spec.potentials.is_object() || !spec.run.is_object())
    throw Error(ErrorKind::ParseError, "\"potentials\" and \"run\" must be objects");
  return spec;
}

inline SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open spec file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return parse_spec(doc);
}

inline bool is_cocycle(const SystemSpec& spec, const std::string& name) {
  return spec.potentials.contains(name) && spec.potentials[name].value("type", "") == "cocycle";
}

inline const nlohmann::json& potential_entry(const SystemSpec& spec, const std::string& name) {
  if (!spec.potentials.contains(name)) throw Error(ErrorKind::ParseError, "unknown potential \"" + name + "\"");
  return spec.potentials[name];
}

template <typename S>
LocallyConstantPotential<S> load_table(const SystemSpec& spec, const std::string& name) {
  const auto& p = potential_entry(spec, name);
  const std::string type = p.value("type", "");
  const Sft& sft = spec.sft;
  auto scalar = [](const nlohmann::json& v) { return from_rational<S>(parse_value(v)); };
  if (type == "symbol") {
    std::vector<S> w;
    for (const auto& v : p.at("weights")) w.push_back(scalar(v));
    return LocallyConstantPotential<S>::from_symbol_weights(sft, w);
  }
  if (type == "block") {
    std::map<Word, S> table;
    for (const auto& entry : p.at("weights")) table[parse_word(entry.at("block"))] = scalar(entry.at("value"));
    return LocallyConstantPotential<S>::from_block_weights(sft, p.at("range").get<std::size_t>(), table);
  }
  if (type == "constant") return LocallyConstantPotential<S>::constant(sft, scalar(p.at("value")));
  if (type == "indicator") {
    const auto s = p.at("symbol").get<Symbol>();
    if (s >= sft.alphabet_size()) throw Error(ErrorKind::ParseError, "indicator symbol out of range");
    return LocallyConstantPotential<S>::indicator(sft, s);
  }
  if (type == "cocycle")
    throw Error(ErrorKind::InvalidArgument, "potential \"" + name + "\" is a cocycle; this command needs a table");
  throw Error(ErrorKind::ParseError, "potential \"" + name + "\" has unknown type \"" + type + "\"");
}

inline CocyclePotential load_cocycle(const SystemSpec& spec, const std::string& name) {
  const auto& p = potential_entry(spec, name);
  std::vector<Eigen::MatrixXd> mats;
  for (const auto& m : p.at("matrices")) {
    const auto rows = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd a(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& row = m.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != rows) throw Error(ErrorKind::ParseError, "matrices must be square");
      for (Eigen::Index j = 0; j < rows; ++j) a(i, j) = to_double(parse_value(row.at(static_cast<std::size_t>(j))));
    }
    mats.push_back(a);
  }
  if (mats.size() != spec.sft.alphabet_size())
    throw Error(ErrorKind::ParseError, "cocycle \"" + name + "\" needs one matrix per symbol");
  return CocyclePotential(std::move(mats));
}

// ---------------------------------------------------------------------------
// Settings: defaults, then the spec file's run section, then flags
// ---------------------------------------------------------------------------

struct Settings {
  std::string mode = "exact";
  std::string f = "f";
  std::string g = "g";
  std::string phi = "phi";
  std::string psi;  // defaults to g
  std::optional<std::string> alpha;
  std::optional<std::string> sigma;
  std::size_t grid = 11;
  std::size_t depth = 8;
  std::size_t growth = 4;
  std::size_t first_block = 8;
  std::uint64_t seed = 1;
  std::size_t n = 16;
  std::size_t horizon_cap = 24;
  std::optional<Word> cycle;
  std::string csv_dir;
};

inline void apply_run_section(Settings& s, const nlohmann::json& run) {
  auto text = [&](const char* key, std::string& dst) {
    if (run.contains(key)) dst = run[key].get<std::string>();
  };
  auto number = [&](const char* key, auto& dst) {
    if (run.contains(key)) dst = run[key].get<std::decay_t<decltype(dst)>>();
  };
  try {
    text("mode", s.mode);
    text("f", s.f);
    text("g", s.g);
    text("phi", s.phi);
    text("psi", s.psi);
    if (run.contains("alpha")) s.alpha = run["alpha"].is_string() ? run["alpha"].get<std::string>() : run["alpha"].dump();
    if (run.contains("sigma")) s.sigma = run["sigma"].is_string() ? run["sigma"].get<std::string>() : run["sigma"].dump();
    number("grid", s.grid);
    number("depth", s.depth);
    number("growth", s.growth);
    number("first_block", s.first_block);
    number("seed", s.seed);
    number("n", s.n);
    number("horizon_cap", s.horizon_cap);
    if (run.contains("cycle")) s.cycle = parse_word(run["cycle"]);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad run section: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

template <typename S>
Json num(const S& x) {
  if constexpr (is_exact_v<S>) return to_string(x);
  else return x;
}

template <typename S>
std::string csv_num(const S& x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", to_double(x));
  return buf;
}

inline Json word_json(const Word& w) {
  Json a = Json::array();
  for (Symbol s : w) a.push_back(s);
  return a;
}

inline Json cycle_json(const std::optional<Cycle>& c) { return c ? word_json(c->symbols()) : Json(nullptr); }

template <typename S>
Json measure_json(const BlockPresentation& bp, const EdgeFrequencyVector<S>& v) {
  Json a = Json::array();
  for (std::size_t e = 0; e < v.size(); ++e) {
    if (is_zero<S>(v.freq[e])) continue;
    a.push_back(Json{{"block", word_json(bp.edge_block(e))}, {"mass", num(v.freq[e])}});
  }
  return a;
}

inline std::ofstream open_csv(const Settings& s, const std::string& file) {
  std::filesystem::create_directories(s.csv_dir);
  std::ofstream out(std::filesystem::path(s.csv_dir) / file);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + file + " in " + s.csv_dir);
  return out;
}

template <typename S>
S setting_scalar(const std::optional<std::string>& v, const char* name) {
  if (!v) throw Error(ErrorKind::ParseError, std::string("missing required parameter ") + name);
  return from_rational<S>(parse_rational(*v));
}

template <typename S>
DenominatorBound sigma_for(const Settings& s, std::initializer_list<const LocallyConstantPotential<S>*> dens) {
  if (s.sigma) return DenominatorBound(to_double(parse_rational(*s.sigma)));
  double best = std::numeric_limits<double>::infinity();
  for (const auto* d : dens) best = std::min(best, to_double(d->min_weight()));
  return DenominatorBound(best);
}

inline Json header(const char* command, const std::string& mode) { return Json{{"command", command}, {"mode", mode}}; }

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline Json cmd_info(const SystemSpec& spec) {
  const Sft& sft = spec.sft;
  Json out{{"command", "info"}, {"alphabet", sft.alphabet_size()}, {"edge_count", sft.edge_count()}};
  Json edges = Json::array();
  for (const Edge& e : sft.edges()) edges.push_back(Json::array({e.from, e.to}));
  out["edges"] = edges;
  out["strongly_connected"] = detail::strongly_connected(sft);
  out["period"] = out["strongly_connected"].get<bool>() ? Json(detail::period(sft)) : Json(nullptr);
  out["mixing"] = sft.is_mixing();
  out["mixing_time"] = sft.mixing_time() ? Json(*sft.mixing_time()) : Json(nullptr);
  try {
    auto cycles = enumerate_simple_cycles(sft, sft.alphabet_size(), 100000);
    out["simple_cycles"] = cycles.size();
  } catch (const Error&) {
    out["simple_cycles"] = nullptr;
  }
  Json pots = Json::array();
  for (const auto& [name, p] : spec.potentials.items()) {
    Json entry{{"name", name}, {"type", p.value("type", "")}};
    if (p.value("type", "") == "cocycle") {
      auto c = load_cocycle(spec, name);
      entry["dimension"] = c.dimension();
      entry["diagonal"] = c.is_diagonal();
    } else {
      entry["range"] = load_table<Rational>(spec, name).range();
    }
    pots.push_back(entry);
  }
  out["potentials"] = pots;
  out["suspension"] = !spec.suspension.is_null();
  return out;
}

template <typename S>
Json cmd_extremal(const SystemSpec& spec, const Settings& s, Sense sense) {
  const char* key = sense == Sense::Maximize ? "beta" : "eta";
  if (is_cocycle(spec, s.f)) {
    auto c = load_cocycle(spec, s.f);
    CocycleExtremalOptions opt;
    opt.horizon = std::min(s.n, s.horizon_cap);
    auto r = cocycle_extremal_average(spec.sft, c, sense, opt);
    Json out = header(key, "double");
    out["potential"] = s.f;
    out[std::string(key) + "_lower"] = r.interval.lo;
    out[std::string(key) + "_upper"] = r.interval.hi;
    out["diagonal_exact"] = r.diagonal_exact;
    out["approximant_value"] = r.approximant_value;
    out["approximant_error"] = r.approximant_error;
    out["periodic_bound"] = r.periodic_bound;
    out["horizon_upper"] = r.horizon_upper ? Json(*r.horizon_upper) : Json(nullptr);
    return out;
  }
  auto f = load_table<S>(spec, s.f);
  auto r = sense == Sense::Maximize ? max_ergodic_average(spec.sft, f) : min_ergodic_average(spec.sft, f);
  Json out = header(key, s.mode);
  out["potential"] = s.f;
  out[key] = num(r.value);
  out["witness_cycle"] = word_json(r.witness.symbols());
  out["graph_value"] = num(r.graph_value);
  out["lp_value"] = num(r.lp_value);
  return out;
}

template <typename S>
Json cmd_lambda(const SystemSpec& spec, const Settings& s) {
  auto f = load_table<S>(spec, s.f);
  auto phi = load_table<S>(spec, s.phi);
  const S alpha = setting_scalar<S>(s.alpha, "--alpha");
  auto r = conditional_max(spec.sft, f, phi, alpha);
  auto model = EdgeModel::for_potentials<S>(spec.sft, {&f, &phi});
  Json out = header("lambda", s.mode);
  out["f"] = s.f;
  out["phi"] = s.phi;
  out["alpha"] = num(r.alpha);
  out["lambda"] = num(r.value);
  out["clamped"] = r.clamped;
  out["witness_measure"] = measure_json(model.presentation(), r.witness);
  return out;
}

template <typename S>
Json cmd_spectrum(const SystemSpec& spec, const Settings& s) {
  auto f = load_table<S>(spec, s.f);
  auto phi = load_table<S>(spec, s.phi);
  auto r = spectrum(spec.sft, f, phi, s.grid);
  auto model = EdgeModel::for_potentials<S>(spec.sft, {&f, &phi});
  Json out = header("spectrum", s.mode);
  out["f"] = s.f;
  out["phi"] = s.phi;
  out["eta_phi"] = num(r.eta);
  out["beta_phi"] = num(r.beta_phi);
  out["beta_f"] = num(r.beta_f);
  out["alpha1"] = num(r.alpha1);
  out["alpha2"] = num(r.alpha2);
  out["alpha_star"] = num(r.alpha_star);
  out["alpha_star_witness"] = measure_json(model.presentation(), r.alpha_star_witness);
  out["max_adjacent_jump"] = num(r.max_adjacent_jump);
  Json rows = Json::array();
  for (const auto& p : r.grid) rows.push_back(Json{{"alpha", num(p.alpha)}, {"lambda", num(p.lambda)}});
  out["grid"] = rows;
  if (!s.csv_dir.empty()) {
    auto csv = open_csv(s, "spectrum.csv");
    csv << "alpha,lambda_lo,lambda_hi\n";
    for (const auto& p : r.grid) csv << csv_num(p.alpha) << ',' << csv_num(p.lambda) << ',' << csv_num(p.lambda) << '\n';
    out["csv"] = "spectrum.csv";
  }
  return out;
}

template <typename S>
Json cmd_ratio(const SystemSpec& spec, const Settings& s) {
  auto f = load_table<S>(spec, s.f);
  auto g = load_table<S>(spec, s.g);
  Json out = header("ratio", s.mode);
  out["f"] = s.f;
  out["g"] = s.g;
  if (s.alpha) {
    const std::string psi_name = s.psi.empty() ? s.g : s.psi;
    auto phi = load_table<S>(spec, s.phi);
    auto psi = load_table<S>(spec, psi_name);
    auto sigma = sigma_for<S>(s, {&g, &psi});
    const S alpha = setting_scalar<S>(s.alpha, "--alpha");
    auto r = ratio_max_constrained(spec.sft, f, g, phi, psi, alpha, sigma);
    auto model = EdgeModel::for_potentials<S>(spec.sft, {&f, &g, &phi, &psi});
    out["phi"] = s.phi;
    out["psi"] = psi_name;
    out["alpha"] = num(alpha);
    out["sigma"] = sigma.sigma;
    out["ratio"] = num(r.value);
    out["witness_measure"] = measure_json(model.presentation(), r.witness);
    return out;
  }
  auto sigma = sigma_for<S>(s, {&g});
  auto r = ratio_max(spec.sft, f, g, sigma);
  auto model = EdgeModel::for_potentials<S>(spec.sft, {&f, &g});
  out["sigma"] = sigma.sigma;
  out["ratio"] = num(r.value);
  out["witness_cycle"] = cycle_json(r.ergodic_witness);
  out["witness_measure"] = measure_json(model.presentation(), r.witness);
  return out;
}

template <typename S>
Json witness_json(const Sft& sft, const IrregularWitness<S>& w) {
  Json sched = Json::array();
  for (const auto& b : w.schedule)
    sched.push_back(Json{{"k", b.k}, {"N_k", b.block_length}, {"m_k", b.bridge_length}, {"t_k", b.end},
                         {"target", b.target}});
  Json rec = Json::array();
  for (const auto& x : w.oscillation_record) rec.push_back(num(x));
  const std::size_t prefix = std::min<std::size_t>(w.word.size(), 64);
  return Json{{"target_ratios", Json::array({num(w.target_ratio1), num(w.target_ratio2)})},
              {"schedule", sched},
              {"oscillation_record", rec},
              {"word_length", w.word.size()},
              {"word_prefix", word_json(Word(w.word.begin(), w.word.begin() + static_cast<std::ptrdiff_t>(prefix)))},
              {"word_valid", is_valid_word(sft, w.word)},
              {"shadowing_epsilon", 0},
              {"schedule_note", w.schedule_note}};
}

template <typename S>
void write_oscillation_csv(const Settings& s, const IrregularWitness<S>& w, const std::vector<S>& record) {
  auto csv = open_csv(s, "oscillation.csv");
  csv << "k,t_k,ratio\n";
  for (std::size_t i = 0; i < w.schedule.size(); ++i)
    csv << w.schedule[i].k << ',' << w.schedule[i].end << ',' << csv_num(record[i]) << '\n';
}

inline IrregularOptions irregular_options(const Settings& s) {
  IrregularOptions o;
  o.first_block = s.first_block;
  o.seed = s.seed;
  return o;
}

template <typename S>
Json cmd_irregular(const SystemSpec& spec, const Settings& s) {
  const std::string psi_name = s.psi.empty() ? s.g : s.psi;
  auto f = load_table<S>(spec, s.f);
  auto g = load_table<S>(spec, s.g);
  auto phi = load_table<S>(spec, s.phi);
  auto psi = load_table<S>(spec, psi_name);
  auto sigma = sigma_for<S>(s, {&g, &psi});
  auto r = irregular_optimum(spec.sft, f, g, phi, psi, s.depth, s.growth, sigma, irregular_options(s));
  Json out = header("irregular", s.mode);
  out["f"] = s.f;
  out["g"] = s.g;
  out["phi"] = s.phi;
  out["psi"] = psi_name;
  out["seed"] = s.seed;
  out["depth"] = s.depth;
  out["growth"] = s.growth;
  out["ratio_max"] = num(r.value);
  out["ergodic_witness"] = cycle_json(r.ergodic_witness);
  out["phi_psi_range"] = Json::array({num(r.ratio_inf), num(r.ratio_sup)});
  out["supremum_estimate"] = num(r.estimate.value);
  out["low_depth"] = r.estimate.low_depth;
  Json rec = Json::array();
  for (const auto& x : r.objective_record) rec.push_back(num(x));
  out["objective_record"] = rec;
  out["witness"] = witness_json(spec.sft, r.witness);
  if (!s.csv_dir.empty()) {
    write_oscillation_csv(s, r.witness, r.objective_record);
    out["csv"] = "oscillation.csv";
  }
  return out;
}

template <typename S>
Json cmd_suspension(const SystemSpec& spec, const Settings& s, const std::string& sub) {
  if (spec.suspension.is_null()) throw Error(ErrorKind::ParseError, "spec has no \"suspension\" section");
  const auto& sec = spec.suspension;
  if (!sec.contains("roof") || !sec.contains("h"))
    throw Error(ErrorKind::ParseError, "suspension section needs \"roof\" and \"h\"");
  const std::string roof_name = sec["roof"].get<std::string>();
  const std::string h_name = sec["h"].get<std::string>();
  const std::string phi_name = sec.value("phi", s.phi);
  RoofFunction<S> tau(load_table<S>(spec, roof_name));
  FlowObservable<S> h{load_table<S>(spec, h_name)};
  Json out = header("suspension", s.mode);
  out["operation"] = sub;
  out["roof"] = roof_name;
  out["h"] = h_name;
  if (sub == "average") {
    if (!s.cycle) throw Error(ErrorKind::ParseError, "suspension average needs --cycle");
    auto model = EdgeModel::for_potentials<S>(spec.sft, {&h.fiber_integrated, &tau.potential()});
    auto mu = periodic_orbit_measure<S>(model.presentation(), *s.cycle);
    out["cycle"] = word_json(*s.cycle);
    out["flow_average"] = num(flow_average(spec.sft, h, mu, tau));
    return out;
  }
  FlowObservable<S> phi{load_table<S>(spec, phi_name)};
  out["phi"] = phi_name;
  if (sub == "level-set") {
    const S alpha = setting_scalar<S>(s.alpha, "--alpha");
    auto r = flow_level_set_optimum(spec.sft, h, phi, alpha, tau);
    auto model = EdgeModel::for_potentials<S>(spec.sft, {&h.fiber_integrated, &phi.fiber_integrated, &tau.potential()});
    out["alpha"] = num(alpha);
    out["value"] = num(r.value);
    out["base_measure"] = measure_json(model.presentation(), r.base_measure);
    out["base_roof_average"] = num(r.base_roof_average);
    return out;
  }
  if (sub == "irregular") {
    FlowIrregularOptions opt;
    opt.depth = s.depth;
    opt.growth = s.growth;
    opt.witness = irregular_options(s);
    auto r = flow_irregular_optimum(spec.sft, h, phi, tau, opt);
    out["value"] = num(r.value);
    out["ergodic_witness"] = cycle_json(r.ergodic_witness);
    out["phi_flow_range"] = Json::array({num(r.phi_inf), num(r.phi_sup)});
    Json hr = Json::array();
    for (const auto& x : r.flow_h_record) hr.push_back(num(x));
    out["flow_h_record"] = hr;
    out["witness"] = witness_json(spec.sft, r.witness);
    if (!s.csv_dir.empty()) {
      write_oscillation_csv(s, r.witness, r.flow_h_record);
      out["csv"] = "oscillation.csv";
    }
    return out;
  }
  throw Error(ErrorKind::ParseError, "unknown suspension operation \"" + sub + "\" (average, level-set, irregular)");
}

template <typename S>
Json cmd_horizon(const SystemSpec& spec, const Settings& s) {
  if (is_cocycle(spec, s.f)) {
    auto c = load_cocycle(spec, s.f);
    CocycleHorizonOptions opt;
    opt.horizon_cap = s.horizon_cap;
    auto r = finite_horizon_max(spec.sft, c, s.n, opt);
    Json out = header("horizon", "double");
    out["potential"] = s.f;
    out["n"] = s.n;
    out["value"] = r.value;
    out["certified_upper"] = r.certified_upper;
    out["upper_sequence"] = r.upper_sequence;
    out["maximizer"] = word_json(r.maximizer);
    return out;
  }
  auto f = load_table<S>(spec, s.f);
  auto r = finite_horizon_max(spec.sft, f, s.n);
  auto beta = max_ergodic_average(spec.sft, f);
  const S c = S(2) * S(static_cast<long>(f.range())) * f.max_abs_weight();
  const S bound = c / S(static_cast<long>(s.n));
  const S gap = abs_value(S(r.value - beta.value));
  Json out = header("horizon", s.mode);
  out["potential"] = s.f;
  out["n"] = s.n;
  out["value"] = num(r.value);
  out["beta"] = num(beta.value);
  out["gap"] = num(gap);
  out["bound"] = num(bound);
  out["within_bound"] = gap <= bound;
  out["maximizer"] = word_json(r.maximizer);
  return out;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

template <typename S>
Json dispatch(const std::string& command, const std::string& sub, const SystemSpec& spec, const Settings& s) {
  if (command == "info") return cmd_info(spec);
  if (command == "beta") return cmd_extremal<S>(spec, s, Sense::Maximize);
  if (command == "eta") return cmd_extremal<S>(spec, s, Sense::Minimize);
  if (command == "lambda") return cmd_lambda<S>(spec, s);
  if (command == "spectrum") return cmd_spectrum<S>(spec, s);
  if (command == "ratio") return cmd_ratio<S>(spec, s);
  if (command == "irregular") return cmd_irregular<S>(spec, s);
  if (command == "suspension") return cmd_suspension<S>(spec, s, sub);
  if (command == "horizon") return cmd_horizon<S>(spec, s);
  throw Error(ErrorKind::ParseError, "unknown command " + command);
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ergodic optimization on subshifts of finite type"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string spec_path;
  std::string sub;
  std::optional<std::string> mode, f, g, phi, psi, alpha, sigma, cycle, csv;
  std::optional<std::size_t> grid, depth, growth, n, first_block;
  std::optional<std::uint64_t> seed;

  auto common = [&](CLI::App* c) {
    c->add_option("spec", spec_path, "system spec (JSON)")->required();
    c->add_option("--mode", mode, "exact or double")->check(CLI::IsMember({"exact", "double"}));
    c->add_option("--csv", csv, "directory for CSV side files");
  };
  auto named = [&](CLI::App* c, bool with_g, bool with_phi) {
    c->add_option("-f,--potential", f, "name of the potential F");
    if (with_g) {
      c->add_option("-g,--denominator", g, "name of the denominator G");
      c->add_option("--sigma", sigma, "lower bound for denominator block weights");
    }
    if (with_phi) {
      c->add_option("--phi", phi, "name of the constraint potential");
      if (with_g) c->add_option("--psi", psi, "name of the constraint denominator");
    }
  };

  auto* info = app.add_subcommand("info", "SFT diagnostics");
  common(info);
  for (const char* name : {"beta", "eta"}) {
    auto* c = app.add_subcommand(name, std::string(name == std::string("beta") ? "maximum" : "minimum") +
                                           " ergodic average");
    common(c);
    named(c, false, false);
    c->add_option("--n", n, "horizon for cocycle upper bounds");
  }
  auto* lambda = app.add_subcommand("lambda", "conditional maximum ergodic average");
  common(lambda);
  named(lambda, false, true);
  lambda->add_option("--alpha", alpha, "level of the constraint")->required();
  auto* spec_cmd = app.add_subcommand("spectrum", "conditional spectrum on a uniform grid");
  common(spec_cmd);
  named(spec_cmd, false, true);
  spec_cmd->add_option("--grid", grid, "number of grid points")->check(CLI::Range(3, 1 << 20));
  auto* ratio = app.add_subcommand("ratio", "maximum ratio of ergodic averages");
  common(ratio);
  named(ratio, true, true);
  ratio->add_option("--alpha", alpha, "level of the ratio constraint");
  auto* irregular = app.add_subcommand("irregular", "irregular-point witness");
  common(irregular);
  named(irregular, true, true);
  irregular->add_option("--depth", depth, "number of blocks");
  irregular->add_option("--growth", growth, "block growth factor");
  irregular->add_option("--seed", seed, "sampler seed");
  irregular->add_option("--first-block", first_block, "length of the first block");
  auto* susp = app.add_subcommand("suspension", "suspension-flow operations");
  susp->add_option("operation", sub, "average, level-set or irregular")
      ->required()
      ->check(CLI::IsMember({"average", "level-set", "irregular"}));
  common(susp);
  susp->add_option("--alpha", alpha, "flow level for level-set");
  susp->add_option("--cycle", cycle, "periodic word for average, e.g. 0,1");
  susp->add_option("--depth", depth, "number of blocks");
  susp->add_option("--growth", growth, "block growth factor");
  susp->add_option("--seed", seed, "sampler seed");
  auto* horizon = app.add_subcommand("horizon", "finite-horizon maximum (1/n) max f_n");
  common(horizon);
  named(horizon, false, false);
  horizon->add_option("--n", n, "horizon")->check(CLI::PositiveNumber);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: ParseError: " << e.what() << "\n";
    return kParse;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    SystemSpec spec = load_spec(spec_path);
    Settings s;
    apply_run_section(s, spec.run);
    if (mode) s.mode = *mode;
    if (f) s.f = *f;
    if (g) s.g = *g;
    if (phi) s.phi = *phi;
    if (psi) s.psi = *psi;
    if (alpha) s.alpha = alpha;
    if (sigma) s.sigma = sigma;
    if (grid) s.grid = *grid;
    if (depth) s.depth = *depth;
    if (growth) s.growth = *growth;
    if (n) s.n = *n;
    if (first_block) s.first_block = *first_block;
    if (seed) s.seed = *seed;
    if (csv) s.csv_dir = *csv;
    if (cycle) {
      Word w;
      std::stringstream ss(*cycle);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          w.push_back(static_cast<Symbol>(std::stoul(tok)));
        } catch (const std::exception&) {
          throw Error(ErrorKind::ParseError, "bad --cycle symbol \"" + tok + "\"");
        }
      }
      s.cycle = w;
    }
    if (s.mode != "exact" && s.mode != "double") throw Error(ErrorKind::ParseError, "mode must be exact or double");

    Json result = s.mode == "exact" ? dispatch<Rational>(command, sub, spec, s) : dispatch<double>(command, sub, spec, s);
    out << result.dump(2) << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: ParseError: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), out, err);
}

}  // namespace ergopt::cli
