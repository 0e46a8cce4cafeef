#include "dyadic/serialize.hpp"

#include <algorithm>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"

namespace dyadic {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

int resolution_field(const Json& j) {
  const Json& r = field(j, "resolution");
  if (!r.is_number_integer()) throw InvalidInput("resolution must be an integer");
  const int n = r.get<int>();
  check_resolution(n);
  return n;
}

template <typename T>
T integer_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw InvalidInput(std::string("field '") + key + "' must be an integer");
  return v.get<T>();
}

std::vector<Cell> raw_images(const Json& j) {
  const int n = resolution_field(j);
  const Json& images = field(j, "images");
  if (!images.is_array()) throw InvalidInput("images must be an array");
  std::vector<Cell> out;
  out.reserve(images.size());
  for (const Json& v : images) {
    if (!v.is_number_unsigned()) throw InvalidInput("images must be non-negative integers");
    out.push_back(v.get<Cell>());
  }
  if (out.size() != (std::size_t{1} << n)) throw InvalidInput("image count does not match resolution");
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Json to_json(const Rational& value) { return to_string(value); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw InvalidInput("rationals are encoded as \"p/q\" strings");
}

Json to_json(const DyadicSet& set) {
  return Json{{"resolution", set.resolution()}, {"hex", set.to_hex()}};
}

DyadicSet set_from_json(const Json& j) {
  const Json& hex = field(j, "hex");
  if (!hex.is_string()) throw InvalidInput("hex must be a string");
  return DyadicSet::from_hex(resolution_field(j), hex.get<std::string>());
}

Json to_json(const StepFunction& f) {
  Json values = Json::array();
  for (const auto& v : f.values()) values.push_back(to_string(v));
  return Json{{"resolution", f.resolution()}, {"values", values}};
}

StepFunction step_function_from_json(const Json& j) {
  const Json& values = field(j, "values");
  if (!values.is_array()) throw InvalidInput("values must be an array");
  std::vector<Rational> out;
  for (const Json& v : values) out.push_back(rational_from_json(v));
  return StepFunction(resolution_field(j), std::move(out));
}

Json to_json(const DyadicPermutation& t) {
  return Json{{"resolution", t.resolution()},
              {"images", std::vector<Cell>(t.images().begin(), t.images().end())}};
}

DyadicPermutation permutation_from_json(const Json& j) {
  return DyadicPermutation(resolution_field(j), raw_images(j));
}

Json to_json(const Tower& tower, const std::string& transform_ref) {
  return Json{{"transform", transform_ref},
              {"base", to_json(tower.base)},
              {"height", tower.height},
              {"remainder_measure", to_string(tower.remainder_measure())}};
}

Json to_json(const WhirlyCertificate& c) {
  return Json{{"m", c.m},
              {"epsilon", to_json(c.epsilon)},
              {"gamma", to_json(c.gamma)},
              {"delta", to_json(c.delta)},
              {"n0", c.n0},
              {"height", c.height},
              {"blocks", c.blocks},
              {"closeness", to_json(c.closeness)},
              {"um_defect", to_json(c.um_defect)},
              {"um_worst_block", c.um_worst_block},
              {"bound_lhs", to_json(c.bound_lhs)},
              {"bound_rhs", to_json(c.bound_rhs)},
              {"a", to_json(c.a)},
              {"b", to_json(c.b)},
              {"t0", to_json(c.t0)},
              {"s", to_json(c.s)}};
}

WhirlyCertificate certificate_from_json(const Json& j) {
  WhirlyCertificate c;
  c.m = integer_field<int>(j, "m");
  c.epsilon = rational_from_json(field(j, "epsilon"));
  c.gamma = rational_from_json(field(j, "gamma"));
  c.delta = rational_from_json(field(j, "delta"));
  c.n0 = integer_field<std::int64_t>(j, "n0");
  c.height = integer_field<std::int64_t>(j, "height");
  c.blocks = integer_field<std::int64_t>(j, "blocks");
  c.closeness = rational_from_json(field(j, "closeness"));
  c.um_defect = rational_from_json(field(j, "um_defect"));
  c.um_worst_block = integer_field<std::uint64_t>(j, "um_worst_block");
  c.bound_lhs = rational_from_json(field(j, "bound_lhs"));
  c.bound_rhs = rational_from_json(field(j, "bound_rhs"));
  c.a = set_from_json(field(j, "a"));
  c.b = set_from_json(field(j, "b"));
  c.t0 = permutation_from_json(field(j, "t0"));
  c.s = permutation_from_json(field(j, "s"));
  return c;
}

VerificationReport verify_certificate_json(const Json& j) {
  for (const char* key : {"t0", "s"}) {
    const std::vector<Cell> images = raw_images(field(j, key));
    std::vector<char> seen(images.size(), 0);
    for (Cell y : images) {
      if (y >= images.size() || seen[y]) {
        VerificationReport report;
        report.ok = false;
        report.violations.push_back("bijectivity");
        return report;
      }
      seen[y] = 1;
    }
  }
  return verify_certificate(certificate_from_json(j));
}

Json to_json(const Witness& w) {
  return Json{{"n", w.n}, {"defect", to_json(w.defect)}, {"intersection", to_json(w.intersection)}};
}

Json to_json(const NeighborhoodSpec& spec) {
  if (const auto* block = std::get_if<BlockNeighborhood>(&spec)) return Json{{"kind", "U_m"}, {"m", block->m}};
  const auto& set = std::get<SetNeighborhood>(spec);
  return Json{{"kind", "N(A,eps)"}, {"set", to_json(set.set)}, {"epsilon", to_json(set.epsilon)}};
}

Json to_json(const IPPrefix& p) {
  Json rows = Json::array();
  for (const auto& row : p.verification) {
    rows.push_back(Json{{"subset", row.subset_mask},
                        {"sum", row.sum},
                        {"in_neighborhood", row.in_neighborhood},
                        {"intersection", to_json(row.intersection)}});
  }
  return Json{{"generators", p.generators},
              {"neighborhood", to_json(p.neighborhood)},
              {"a", to_json(p.a)},
              {"b", to_json(p.b)},
              {"complete", p.complete},
              {"verified", p.verified()},
              {"failure", p.failure},
              {"verification", rows}};
}

Json to_json(const UrysohnResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.certificate) {
    rows.push_back(Json{{"level", row.level},
                        {"m", row.m},
                        {"oscillation", to_json(row.oscillation)},
                        {"bound", to_json(row.bound)},
                        {"verified", row.verified}});
  }
  Json levels = Json::array();
  for (const auto& [value, set] : r.level_sets) {
    levels.push_back(Json{{"value", to_json(value)}, {"set", to_json(set)}});
  }
  return Json{{"status", to_string(r.status)},
              {"coverage", to_json(r.coverage)},
              {"l2_error_squared", to_json(r.l2_error_squared)},
              {"within_epsilon", r.within_epsilon},
              {"scales", r.scales},
              {"certificate", rows},
              {"level_sets", levels},
              {"log", r.log},
              {"f", to_json(r.f)}};
}

DyadicSet parse_set_spec(std::string_view spec, int resolution) {
  check_resolution(resolution);
  spec = trim(spec);
  if (spec == "empty") return DyadicSet::empty(resolution);
  if (spec == "full") return DyadicSet::full(resolution);
  if (spec.rfind("hex:", 0) == 0) return DyadicSet::from_hex(resolution, spec.substr(4));
  if (spec.rfind("rand:", 0) == 0) {
    const std::string_view rest = spec.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw InvalidInput("set spec 'rand:<p/q>:<seed>' needs a seed");
    const Rational fraction = parse_rational(rest.substr(0, colon));
    if (fraction < 0 || fraction > 1) throw InvalidInput("random set fraction must lie in [0, 1]");
    const std::string seed_text(rest.substr(colon + 1));
    std::uint64_t seed = 0;
    try {
      std::size_t used = 0;
      seed = std::stoull(seed_text, &used);
      if (used != seed_text.size()) throw InvalidInput("bad seed '" + seed_text + "'");
    } catch (const std::logic_error&) {
      throw InvalidInput("bad seed '" + seed_text + "'");
    }
    const Rational cells = fraction * pow2(resolution);
    return random_set(resolution, (numerator(cells) / denominator(cells)).convert_to<std::uint64_t>(), seed);
  }
  // Union of half-open intervals; "∪", "U" and "+" all separate pieces.
  std::string text(spec);
  for (const std::string sep : {"∪", "U", "+"}) {
    for (std::size_t pos = text.find(sep); pos != std::string::npos; pos = text.find(sep, pos)) {
      text.replace(pos, sep.size(), " ");
    }
  }
  DyadicSet out(resolution);
  std::size_t pos = 0;
  bool any = false;
  while (true) {
    pos = text.find_first_not_of(" \t", pos);
    if (pos == std::string::npos) break;
    if (text[pos] != '[') throw InvalidInput("bad set spec '" + std::string(spec) + "'");
    const auto comma = text.find(',', pos);
    const auto close = text.find(')', pos);
    if (comma == std::string::npos || close == std::string::npos || comma > close) {
      throw InvalidInput("bad interval in set spec '" + std::string(spec) + "'");
    }
    const Rational lo = parse_rational(text.substr(pos + 1, comma - pos - 1));
    const Rational hi = parse_rational(text.substr(comma + 1, close - comma - 1));
    out |= DyadicSet::interval(resolution, lo, hi);
    any = true;
    pos = close + 1;
  }
  if (!any) throw InvalidInput("empty set spec; use 'empty' for the null set");
  return out;
}

}  // namespace dyadic
