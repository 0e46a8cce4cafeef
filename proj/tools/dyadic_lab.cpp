// dyadic_lab: batch front-end for the dyadic measure-algebra toolkit.
//
// Every run writes <out>/manifest.json (inputs, seed, versions, exact outputs) plus a
// subcommand artifact. Exit codes: 0 success, 1 witness or certificate not found,
// 2 invalid input, 3 resource cap.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadic/concentration.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"
#include "dyadic/ip_whirly.hpp"
#include "dyadic/perturbation.hpp"
#include "dyadic/serialize.hpp"
#include "dyadic/stable_sets.hpp"
#include "dyadic/whirly_search.hpp"

namespace fs = std::filesystem;
using dyadic::Json;
using dyadic::Rational;
using dyadic::to_string;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct Run {
  std::string subcommand;
  fs::path out_dir = ".";
  unsigned threads = 1;
  Json inputs = Json::object();
  Json outputs = Json::object();
  std::vector<std::string> artifacts;

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(out_dir);
    std::ofstream f(out_dir / name, std::ios::binary);
    f << content;
    if (!f) throw dyadic::InvalidInput("cannot write " + (out_dir / name).string());
    artifacts.push_back(name);
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void manifest(int exit_code) {
    Json m = Json::object();
    m["tool"] = "dyadic_lab";
    m["versions"] = Json{{"dyadic_lab", kToolVersion}, {"resolution_cap", dyadic::resolution_cap()}};
    m["subcommand"] = subcommand;
    m["inputs"] = inputs;
    m["seed"] = inputs.contains("seed") ? inputs["seed"] : Json(nullptr);
    m["outputs"] = outputs;
    m["artifacts"] = artifacts;
    m["exit_code"] = exit_code;
    fs::create_directories(out_dir);
    std::ofstream f(out_dir / "manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
  }
};

Rational rational_arg(const std::string& text) { return dyadic::parse_rational(text); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw dyadic::InvalidInput("cannot read " + path);
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw dyadic::InvalidInput(path + " is not valid JSON: " + std::string(e.what()));
  }
}

// Generator spec, "json:<file>" holding a serialized permutation, or "cert:<file>"
// for the perturbed map S of a certificate.
dyadic::DyadicPermutation load_transform(const std::string& spec) {
  if (spec.rfind("json:", 0) == 0) return dyadic::permutation_from_json(read_json_file(spec.substr(5)));
  if (spec.rfind("cert:", 0) == 0) {
    const Json j = read_json_file(spec.substr(5));
    if (!j.contains("s")) throw dyadic::InvalidInput(spec.substr(5) + " has no field s");
    return dyadic::permutation_from_json(j["s"]);
  }
  return dyadic::parse_generator(spec);
}

// "transpositions:n" or a generator spec whose powers form the truncation.
dyadic::GroupTruncation parse_group(const std::string& spec, std::int64_t power_bound) {
  if (spec.rfind("transpositions:", 0) == 0) {
    return dyadic::transposition_group(std::stoi(spec.substr(15)));
  }
  return dyadic::GroupTruncation::powers(load_transform(spec), power_bound);
}

dyadic::PairKind parse_pair_kind(const std::string& s) {
  if (s == "intervals") return dyadic::PairKind::kIntervals;
  if (s == "disjoint") return dyadic::PairKind::kDisjointIntervals;
  if (s == "random") return dyadic::PairKind::kRandomSets;
  throw dyadic::InvalidInput("pair kind must be intervals, disjoint or random");
}

// Loads a JSON object of option values and appends "--key value" for every key the
// command line does not already set.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw dyadic::InvalidInput("--config needs a file");
  const std::string path = *(it + 1);
  args.erase(it, it + 2);
  const Json config = read_json_file(path);
  if (!config.is_object()) throw dyadic::InvalidInput("config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    const auto push = [&](const Json& v) {
      args.push_back(flag);
      args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) push(v);
    } else {
      push(value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  Run run;
  CLI::App app{"dyadic_lab: exact experiments on the dyadic measure algebra"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", run.out_dir, "Directory for manifest.json and artifacts");
  app.add_option("--threads", run.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 256u));
  std::string cap_text;
  app.add_option("--resolution-cap", cap_text, "Override DYADIC_RESOLUTION_CAP");

  // Shared option storage.
  std::string t_spec, a_spec = "[0,1/4)", b_spec = "[1/2,3/4)", eps_text, alpha_text, delta_text;
  std::string gamma_text, eta_text = "1/100", mixing_threshold_text = "1/2", group_spec;
  std::string certificate_path, pair_kind = "intervals", family = "hypercube";
  int m = 1, depth = 1, k = 3, order = 2, m_max = 2, max_levels = 8, retry_cap = 4;
  std::int64_t max_power = -1, search_bound = 1024, horizon = 4096, power_bound = 4096, mixing_horizon = 64;
  std::uint64_t seed = 1, samples = 100000;
  std::size_t pair_count = 20;
  bool no_zero = false, allow_zero = false, strict_frequency = false;
  std::vector<std::string> samplers, a_list, b_list;
  std::vector<int> dims;
  std::vector<double> eps_grid;

  auto* perturb = app.add_subcommand("perturb", "Build S near T0 with a whirly certificate");
  perturb->add_option("--t0", t_spec, "Generator spec, e.g. baker:16")->required();
  perturb->add_option("--A", a_spec, "Set spec");
  perturb->add_option("--B", b_spec, "Set spec");
  perturb->add_option("--m", m);
  perturb->add_option("--eps", eps_text)->default_str("1/32");
  perturb->add_option("--eta", eta_text);
  perturb->add_option("--horizon", horizon);
  perturb->add_option("--gamma", gamma_text);
  perturb->add_option("--delta", delta_text);
  perturb->add_option("--mixing-horizon", mixing_horizon);
  perturb->add_option("--mixing-threshold", mixing_threshold_text);
  perturb->add_option("--retry-cap", retry_cap);
  perturb->add_flag("--strict-frequency", strict_frequency);

  auto* verify = app.add_subcommand("verify", "Re-check a serialized certificate");
  verify->add_option("--certificate", certificate_path)->required();

  auto* whirly = app.add_subcommand("whirly", "Search a whirly witness n");
  whirly->add_option("--t", t_spec)->required();
  whirly->add_option("--A", a_spec);
  whirly->add_option("--B", b_spec);
  whirly->add_option("--m", m);
  whirly->add_option("--max-power", max_power, "Default: the full period 2^n");
  whirly->add_flag("--no-zero", no_zero, "Exclude n = 0");

  auto* rigidity = app.add_subcommand("rigidity", "Smallest n >= 1 with T^n in U_m");
  rigidity->add_option("--t", t_spec)->required();
  rigidity->add_option("--m", m);
  rigidity->add_option("--max-power", max_power);

  auto* vkm = app.add_subcommand("vkm", "Membership in V_{k,m}");
  vkm->add_option("--t", t_spec)->required();
  vkm->add_option("--A", a_spec);
  vkm->add_option("--B", b_spec);
  vkm->add_option("--m", m);
  vkm->add_option("--search-bound", search_bound);
  vkm->add_option("--delta", delta_text);
  vkm->add_flag("--no-zero", no_zero);

  auto* scan = app.add_subcommand("scan", "Pass rates of V_{k,m} over sampled pairs");
  scan->add_option("--sampler", samplers, "Generator spec (repeatable)")->required();
  scan->add_option("--pairs", pair_count);
  scan->add_option("--m-max", m_max);
  scan->add_option("--search-bound", search_bound);
  scan->add_option("--seed", seed);
  scan->add_option("--pair-kind", pair_kind, "intervals, disjoint or random");
  scan->add_flag("--allow-zero", allow_zero);

  auto add_group = [&](CLI::App* sub) {
    sub->add_option("--group", group_spec, "Generator spec (powers) or transpositions:n")->required();
    sub->add_option("--power-bound", power_bound);
    sub->add_option("--A", a_spec);
    sub->add_option("--depth", depth);
  };
  auto* stable = app.add_subcommand("stable", "Tilde, stability, hull and interior of a set");
  add_group(stable);
  auto* separate = app.add_subcommand("separate", "Separation step for a stable set");
  add_group(separate);
  separate->add_option("--eps", eps_text)->required();
  auto* urysohn = app.add_subcommand("urysohn", "Urysohn construction of a G-continuous function");
  add_group(urysohn);
  urysohn->add_option("--eps", eps_text)->required();
  urysohn->add_option("--max-levels", max_levels);

  auto* ip = app.add_subcommand("ip", "IP-prefix construction");
  ip->add_option("--t", t_spec)->required();
  ip->add_option("--A", a_spec);
  ip->add_option("--B", b_spec);
  ip->add_option("--m", m);
  ip->add_option("--k", k);
  ip->add_option("--search-bound", search_bound);

  auto* skew = app.add_subcommand("skew", "Simultaneous rigidity of T and n*alpha");
  skew->add_option("--t", t_spec)->required();
  skew->add_option("--alpha", alpha_text)->required();
  skew->add_option("--m", m);
  skew->add_option("--eps", eps_text)->required();
  skew->add_option("--max-power", max_power);

  auto* product = app.add_subcommand("product-whirly", "Whirly probe of T x ... x T on boxes");
  product->add_option("--t", t_spec)->required();
  product->add_option("--order", order);
  product->add_option("--A", a_list, "Factor set spec; the box is its d-fold power (repeatable)");
  product->add_option("--B", b_list, "Factor set spec (repeatable, paired with --A)");
  product->add_option("--m", m);
  product->add_option("--max-power", max_power);
  product->add_flag("--no-zero", no_zero);

  auto* conc = app.add_subcommand("concentration", "Monte Carlo concentration profile");
  conc->add_option("--family", family, "hypercube, torus, symmetric or levy");
  conc->add_option("--d", dims, "Dimension (levy: stage n); repeatable")->required();
  conc->add_option("--eps", eps_grid, "Epsilon grid (repeatable)")->required();
  conc->add_option("--samples", samples);
  conc->add_option("--seed", seed);

  std::vector<std::string> args;
  try {
    std::vector<std::string> raw(argv + 1, argv + argc);
    args = expand_config(std::move(raw));
  } catch (const dyadic::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(dyadic::ExitCode::kInvalidInput);
  }

  int code = 0;
  try {
    if (!cap_text.empty()) dyadic::set_resolution_cap(std::stoi(cap_text));
    run.subcommand = app.get_subcommands().front()->get_name();
    auto& in = run.inputs;
    auto& out = run.outputs;

    if (*perturb) {
      const auto t0 = load_transform(t_spec);
      const auto a = dyadic::parse_set_spec(a_spec, t0.resolution());
      const auto b = dyadic::parse_set_spec(b_spec, t0.resolution());
      dyadic::PerturbationParams p;
      p.m = m;
      if (!eps_text.empty()) p.epsilon = rational_arg(eps_text);
      p.eta = rational_arg(eta_text);
      p.horizon = horizon;
      if (!gamma_text.empty()) p.gamma = rational_arg(gamma_text);
      if (!delta_text.empty()) p.delta = rational_arg(delta_text);
      p.mixing_horizon = mixing_horizon;
      p.mixing_threshold = rational_arg(mixing_threshold_text);
      p.retry_cap = retry_cap;
      p.strict_frequency = strict_frequency;
      in = Json{{"t0", t_spec}, {"A", a_spec}, {"B", b_spec}, {"m", m},
                {"eps", to_string(p.epsilon)}, {"eta", to_string(p.eta)}, {"horizon", horizon},
                {"gamma", to_string(p.gamma_value())}, {"delta", to_string(p.delta_value())},
                {"mixing_horizon", mixing_horizon}, {"mixing_threshold", to_string(p.mixing_threshold)},
                {"retry_cap", retry_cap}, {"strict_frequency", strict_frequency}};
      const auto result = dyadic::whirly_perturb(t0, a, b, p);
      const auto& d = result.diagnostics;
      out["status"] = to_string(result.status);
      out["message"] = result.message;
      out["diagnostics"] = Json{{"mixing_score", to_string(d.mixing_score)},
                                {"return_intersection", to_string(d.return_intersection)},
                                {"frequency_window", d.frequency_window},
                                {"frequency_good_fraction", to_string(d.frequency_good_fraction)},
                                {"frequency_passed", d.frequency_passed},
                                {"remainder", to_string(d.remainder)},
                                {"base_cells", d.base_cells},
                                {"gamma_cells", d.gamma_cells},
                                {"attempts", d.attempts},
                                {"log", d.log}};
      if (result.certificate) {
        const auto& c = *result.certificate;
        out["certificate"] = Json{{"n0", c.n0}, {"height", c.height}, {"blocks", c.blocks},
                                  {"closeness", to_string(c.closeness)}, {"um_defect", to_string(c.um_defect)},
                                  {"bound_lhs", to_string(c.bound_lhs)}, {"bound_rhs", to_string(c.bound_rhs)}};
        run.write_json("certificate.json", dyadic::to_json(c));
      }
      std::cout << to_string(result.status) << ": " << result.message << "\n";
      code = result.certified() ? 0 : 1;
    } else if (*verify) {
      in = Json{{"certificate", fs::path(certificate_path).filename().string()}};
      const Json j = read_json_file(certificate_path);
      const auto report = dyadic::verify_certificate_json(j);
      out = Json{{"ok", report.ok}, {"violations", report.violations},
                 {"closeness", to_string(report.closeness)}, {"um_defect", to_string(report.um_defect)},
                 {"bound_lhs", to_string(report.bound_lhs)}, {"bound_rhs", to_string(report.bound_rhs)}};
      if (report.ok) {
        std::cout << "certificate verified\n";
      } else {
        for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
      }
      code = report.ok ? 0 : 1;
    } else if (*whirly) {
      const auto t = load_transform(t_spec);
      const auto a = dyadic::parse_set_spec(a_spec, t.resolution());
      const auto b = dyadic::parse_set_spec(b_spec, t.resolution());
      const std::int64_t bound = max_power >= 0 ? max_power : static_cast<std::int64_t>(t.cell_count());
      in = Json{{"t", t_spec}, {"A", a_spec}, {"B", b_spec}, {"m", m}, {"max_power", bound}, {"no_zero", no_zero}};
      const auto w = dyadic::whirly_witness(t, a, b, m, bound, !no_zero, run.threads);
      std::string csv = "generator,A,B,m,n,defect,intersection\n";
      csv += csv_field(t_spec) + "," + csv_field(a_spec) + "," + csv_field(b_spec) + "," + std::to_string(m) + ",";
      csv += w ? std::to_string(w->n) + "," + to_string(w->defect) + "," + to_string(w->intersection) : "none,,";
      csv += "\n";
      run.write("whirly.csv", csv);
      out["witness"] = w ? dyadic::to_json(*w) : Json(nullptr);
      std::cout << csv;
      code = w ? 0 : 1;
    } else if (*rigidity) {
      const auto t = load_transform(t_spec);
      const std::int64_t bound = max_power >= 1 ? max_power : static_cast<std::int64_t>(t.cell_count());
      in = Json{{"t", t_spec}, {"m", m}, {"max_power", bound}};
      const auto w = dyadic::rigidity_witness(t, m, bound, run.threads);
      out["witness"] = w ? dyadic::to_json(*w) : Json(nullptr);
      run.write_json("rigidity.json", out);
      std::cout << (w ? std::to_string(w->n) : std::string("none")) << "\n";
      code = w ? 0 : 1;
    } else if (*vkm) {
      const auto t = load_transform(t_spec);
      const auto a = dyadic::parse_set_spec(a_spec, t.resolution());
      const auto b = dyadic::parse_set_spec(b_spec, t.resolution());
      std::optional<Rational> delta;
      if (!delta_text.empty()) delta = rational_arg(delta_text);
      in = Json{{"t", t_spec}, {"A", a_spec}, {"B", b_spec}, {"m", m}, {"search_bound", search_bound},
                {"delta", delta ? Json(to_string(*delta)) : Json(nullptr)}, {"no_zero", no_zero}};
      const auto n = dyadic::v_km_member(t, a, b, m, search_bound, delta, !no_zero, run.threads);
      out["witness"] = n ? Json(*n) : Json(nullptr);
      run.write_json("vkm.json", out);
      std::cout << (n ? std::to_string(*n) : std::string("none")) << "\n";
      code = n ? 0 : 1;
    } else if (*scan) {
      dyadic::ScanConfig config;
      config.samplers = samplers;
      config.pair_count = pair_count;
      config.m_max = m_max;
      config.search_bound = search_bound;
      config.seed = seed;
      config.pairs = parse_pair_kind(pair_kind);
      config.allow_zero = allow_zero;
      config.threads = run.threads;
      in = Json{{"samplers", samplers}, {"pairs", pair_count}, {"m_max", m_max}, {"search_bound", search_bound},
                {"seed", seed}, {"pair_kind", pair_kind}, {"allow_zero", allow_zero}};
      const auto rows = dyadic::generic_scan(config);
      std::string csv = "sampler,m,passes,pairs,pass_rate\n";
      Json table = Json::array();
      for (const auto& row : rows) {
        csv += csv_field(row.sampler) + "," + std::to_string(row.m) + "," + std::to_string(row.passes) + "," +
               std::to_string(row.pairs) + "," + to_string(row.pass_rate) + "\n";
        table.push_back(Json{{"sampler", row.sampler}, {"m", row.m}, {"passes", row.passes},
                             {"pairs", row.pairs}, {"pass_rate", to_string(row.pass_rate)}});
      }
      out["rows"] = table;
      run.write("scan.csv", csv);
      std::cout << csv;
    } else if (*stable || *separate || *urysohn) {
      const dyadic::ActionTruncation action(parse_group(group_spec, power_bound));
      const auto a = dyadic::parse_set_spec(a_spec, action.resolution());
      in = Json{{"group", group_spec}, {"power_bound", power_bound}, {"A", a_spec}, {"depth", depth}};
      if (*stable) {
        const auto report = dyadic::is_stable(a, action, depth);
        out = Json{{"tilde", dyadic::to_json(dyadic::tilde(a, action, depth))},
                   {"stable", report.stable},
                   {"defect", to_string(report.defect)},
                   {"hull", dyadic::to_json(dyadic::stable_hull(a, action, depth))},
                   {"interior", dyadic::to_json(dyadic::stable_interior(a, action, depth))},
                   {"orbit_count", dyadic::filter_orbit_count(action, depth)},
                   {"whirly_at_depth", dyadic::is_whirly_at(action, depth)}};
        run.write_json("stable.json", out);
        std::cout << (report.stable ? "stable" : "not stable") << ", defect " << to_string(report.defect) << "\n";
      } else if (*separate) {
        const Rational eps = rational_arg(eps_text);
        in["eps"] = to_string(eps);
        const auto sep = dyadic::separate(a, eps, action, depth);
        out = Json{{"d", dyadic::to_json(sep.d)}, {"m", sep.m}, {"k", sep.k},
                   {"complement_gap", to_string(sep.complement_gap)}};
        run.write_json("separation.json", out);
        std::cout << "separated at m = " << sep.m << ", k = " << sep.k << "\n";
      } else {
        const Rational eps = rational_arg(eps_text);
        in["eps"] = to_string(eps);
        in["max_levels"] = max_levels;
        const auto result = dyadic::urysohn(a, eps, action, depth, max_levels);
        out = dyadic::to_json(result);
        run.write_json("urysohn.json", out);
        std::cout << to_string(result.status) << ", |f - 1_A|_2^2 = " << to_string(result.l2_error_squared) << "\n";
        for (const auto& line : result.log) std::cout << "  " << line << "\n";
        code = result.within_epsilon ? 0 : 1;
      }
    } else if (*ip) {
      const auto t = load_transform(t_spec);
      const auto a = dyadic::parse_set_spec(a_spec, t.resolution());
      const auto b = dyadic::parse_set_spec(b_spec, t.resolution());
      in = Json{{"t", t_spec}, {"A", a_spec}, {"B", b_spec}, {"m", m}, {"k", k}, {"search_bound", search_bound}};
      const auto prefix = dyadic::ip_prefix(t, dyadic::BlockNeighborhood{m}, a, b, k, search_bound);
      out = dyadic::to_json(prefix);
      run.write_json("ip.json", out);
      std::cout << (prefix.complete ? "complete" : "incomplete: " + prefix.failure) << "\n";
      code = prefix.complete ? 0 : 1;
    } else if (*skew) {
      const auto t = load_transform(t_spec);
      const Rational alpha = rational_arg(alpha_text);
      const Rational eps = rational_arg(eps_text);
      const std::int64_t bound = max_power >= 1 ? max_power : 4 * static_cast<std::int64_t>(t.cell_count());
      in = Json{{"t", t_spec}, {"alpha", to_string(alpha)}, {"m", m}, {"eps", to_string(eps)}, {"max_power", bound}};
      const auto n = dyadic::skew_rigidity(t, alpha, m, eps, bound);
      out["witness"] = n ? Json(*n) : Json(nullptr);
      run.write_json("skew.json", out);
      std::cout << (n ? std::to_string(*n) : std::string("none")) << "\n";
      code = n ? 0 : 1;
    } else if (*product) {
      const auto t = load_transform(t_spec);
      if (a_list.empty()) a_list = {a_spec};
      if (b_list.empty()) b_list = {b_spec};
      if (a_list.size() != b_list.size()) throw dyadic::InvalidInput("--A and --B must be given equally often");
      const dyadic::ProductSpace space(std::vector<int>(static_cast<std::size_t>(std::max(order, 1)), t.resolution()));
      std::vector<std::pair<dyadic::DyadicSet, dyadic::DyadicSet>> pairs;
      for (std::size_t i = 0; i < a_list.size(); ++i) {
        const auto a = dyadic::parse_set_spec(a_list[i], t.resolution());
        const auto b = dyadic::parse_set_spec(b_list[i], t.resolution());
        pairs.emplace_back(space.box(std::vector<dyadic::DyadicSet>(static_cast<std::size_t>(order), a)),
                           space.box(std::vector<dyadic::DyadicSet>(static_cast<std::size_t>(order), b)));
      }
      const std::int64_t bound = max_power >= 0 ? max_power : static_cast<std::int64_t>(t.cell_count());
      in = Json{{"t", t_spec}, {"order", order}, {"A", a_list}, {"B", b_list}, {"m", m},
                {"max_power", bound}, {"no_zero", no_zero}};
      const auto report = dyadic::whirly_all_orders_probe(t, order, pairs, m, bound, !no_zero);
      std::string csv = "generator,order,A,B,m,n,defect,intersection\n";
      Json rows = Json::array();
      bool all_found = true;
      for (const auto& row : report.rows) {
        csv += csv_field(t_spec) + "," + std::to_string(order) + "," + csv_field(a_list[row.pair]) + "," +
               csv_field(b_list[row.pair]) + "," + std::to_string(m) + ",";
        if (row.witness) {
          csv += std::to_string(*row.witness) + "," + to_string(row.defect) + "," + to_string(row.intersection);
        } else {
          csv += "none,,";
          all_found = false;
        }
        csv += "\n";
        rows.push_back(Json{{"pair", row.pair}, {"witness", row.witness ? Json(*row.witness) : Json(nullptr)},
                            {"defect", to_string(row.defect)}, {"intersection", to_string(row.intersection)}});
      }
      out["rows"] = rows;
      run.write("product_whirly.csv", csv);
      std::cout << csv;
      code = all_found ? 0 : 1;
    } else if (*conc) {
      in = Json{{"family", family}, {"d", dims}, {"eps", eps_grid}, {"samples", samples}, {"seed", seed}};
      std::string csv;
      Json tables = Json::array();
      for (int d : dims) {
        namespace dc = dyadic::concentration;
        dc::Space space;
        if (family == "hypercube") space = dc::hypercube(d);
        else if (family == "torus") space = dc::torus_power(d);
        else if (family == "symmetric") space = dc::symmetric_group(d);
        else if (family == "levy") space = dc::levy_tower(d);
        else throw dyadic::InvalidInput("family must be hypercube, torus, symmetric or levy");
        const auto rows = dc::concentration_profile(space, eps_grid, samples, seed, run.threads);
        const std::string block = dc::to_csv(space, rows);
        csv += csv.empty() ? block : block.substr(block.find('\n') + 1);
        for (const auto& row : rows) {
          tables.push_back(Json{{"family", space.name()}, {"d", space.dimension}, {"eps", row.epsilon},
                                {"alpha", row.alpha}, {"stderr", row.stderr_}});
        }
      }
      out["rows"] = tables;
      run.write("concentration.csv", csv);
      std::cout << csv;
    }
  } catch (const dyadic::ConstructionFailure& e) {
    run.outputs["failure"] = Json{{"kind", e.kind()}, {"message", e.what()}};
    std::cerr << e.kind() << ": " << e.what() << "\n";
    code = static_cast<int>(e.code());
  } catch (const dyadic::Error& e) {
    run.outputs["error"] = e.what();
    std::cerr << "error: " << e.what() << "\n";
    code = static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    code = static_cast<int>(dyadic::ExitCode::kResourceCap);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = static_cast<int>(dyadic::ExitCode::kInvalidInput);
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = static_cast<int>(dyadic::ExitCode::kInvalidInput);
  }
  try {
    run.manifest(code);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write manifest: " << e.what() << "\n";
  }
  return code;
}
