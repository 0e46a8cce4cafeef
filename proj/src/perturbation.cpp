#include "dyadic/perturbation.hpp"

#include <algorithm>
#include <numeric>

#include "dyadic/errors.hpp"
#include "dyadic/generators.hpp"
#include "dyadic/neighborhood.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/tower.hpp"
#include "dyadic/whirly_search.hpp"

namespace dyadic {

Rational PerturbationParams::gamma_value() const { return gamma.value_or(pow2(-2 * m)); }

Rational PerturbationParams::delta_value() const { return delta.value_or(gamma_value() / 10); }

std::int64_t PerturbationParams::min_return_time() const {
  const Rational q = Rational(10) / epsilon;
  Integer c = numerator(q) / denominator(q);
  if (c * denominator(q) != numerator(q)) c += 1;
  return c.convert_to<std::int64_t>();
}

void PerturbationParams::validate() const {
  if (m < 0) throw InvalidInput("m must be non-negative");
  if (epsilon <= 0 || epsilon > 1) throw InvalidInput("epsilon must lie in (0, 1]");
  if (eta <= 0 || eta >= 1) throw InvalidInput("eta must lie in (0, 1)");
  const Rational g = gamma_value();
  if (g <= 0 || g > pow2(-2 * m)) throw InvalidInput("gamma must lie in (0, 2^-2m]");
  if (delta_value() <= 0) throw InvalidInput("delta must be positive");
  if (mixing_horizon < 1) throw InvalidInput("mixing horizon must be >= 1");
  if (retry_cap < 0) throw InvalidInput("retry cap must be non-negative");
  if (horizon < min_return_time()) {
    throw InvalidInput("horizon " + std::to_string(horizon) + " is below ceil(10/eps) = " +
                       std::to_string(min_return_time()));
  }
}

bool WhirlyCertificate::inequalities_hold() const {
  return closeness < epsilon && um_defect < pow2(-2 * m) && bound_lhs > bound_rhs;
}

std::string to_string(PerturbationStatus status) {
  switch (status) {
    case PerturbationStatus::kCertified: return "certified";
    case PerturbationStatus::kNoMixing: return "no-mixing";
    case PerturbationStatus::kFrequencyFailure: return "frequency-failure";
    case PerturbationStatus::kTowerInfeasible: return "tower-infeasible";
    case PerturbationStatus::kCertificateFailure: return "certificate-failure";
  }
  return "unknown";
}

namespace {

// Marks cells whose length-`window` orbit count of `indicator` misses its mean by more
// than a relative eta. Window sums come from cyclic prefix sums along each cycle.
void mark_frequency_failures(const CycleIndex& cycles, const DyadicSet& indicator,
                             std::int64_t window, const Rational& eta, std::vector<char>& bad) {
  const int r = cycles.resolution();
  const auto c = static_cast<__int128>(indicator.count());
  const auto w = static_cast<__int128>(window);
  const auto eta_num = static_cast<__int128>(numerator(eta).convert_to<std::int64_t>());
  const auto eta_den = static_cast<__int128>(denominator(eta).convert_to<std::int64_t>());
  std::vector<std::uint64_t> prefix;
  for (std::size_t k = 0; k < cycles.cycle_count(); ++k) {
    const auto cyc = cycles.cycle(k);
    const std::uint64_t len = cyc.size();
    prefix.assign(len + 1, 0);
    for (std::uint64_t i = 0; i < len; ++i) prefix[i + 1] = prefix[i] + (indicator.contains(cyc[i]) ? 1 : 0);
    const std::uint64_t laps = static_cast<std::uint64_t>(window) / len;
    const std::uint64_t part = static_cast<std::uint64_t>(window) % len;
    for (std::uint64_t p = 0; p < len; ++p) {
      std::uint64_t sum = laps * prefix[len];
      if (p + part <= len) {
        sum += prefix[p + part] - prefix[p];
      } else {
        sum += prefix[len] - prefix[p] + prefix[p + part - len];
      }
      // |sum/w − c/2^r| ≤ η c/2^r  ⇔  η_den·|sum·2^r − w·c| ≤ η_num·w·c
      __int128 diff = (static_cast<__int128>(sum) << r) - w * c;
      if (diff < 0) diff = -diff;
      if (eta_den * diff > eta_num * w * c) bad[cyc[p]] = 1;
    }
  }
}

struct FrequencyOutcome {
  Rational good_fraction;
  bool passed = false;
};

FrequencyOutcome frequency_test(const CycleIndex& cycles, const DyadicSet& d, int m,
                                std::int64_t window, const Rational& eta) {
  const int r = cycles.resolution();
  std::vector<char> bad(std::size_t{1} << r, 0);
  mark_frequency_failures(cycles, d, window, eta, bad);
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << m); ++j) {
    mark_frequency_failures(cycles, DyadicSet::block(r, m, j), window, eta, bad);
  }
  const auto bad_count = static_cast<std::uint64_t>(std::count(bad.begin(), bad.end(), 1));
  const Rational good = 1 - dyadic_measure(bad_count, r);
  return {good, good >= 1 - eta};
}

std::uint64_t ceil_fraction(const Rational& x, std::uint64_t count) {
  const Rational v = x * Integer(count);
  Integer c = numerator(v) / denominator(v);
  if (c * denominator(v) != numerator(v)) c += 1;
  return c.convert_to<std::uint64_t>();
}

// Cells of one tower column: base, T₀ base, ..., T₀^{N-1} base.
void column(const DyadicPermutation& t0, Cell base, std::int64_t height, std::vector<Cell>& out) {
  out.resize(static_cast<std::size_t>(height));
  Cell c = base;
  for (std::int64_t i = 0; i < height; ++i) {
    out[static_cast<std::size_t>(i)] = c;
    c = t0(c);
  }
}

DyadicPermutation build_s(const DyadicPermutation& t0, const Tower& tower, std::uint64_t gamma_cells,
                          std::int64_t n0) {
  const std::uint64_t cells = t0.cell_count();
  std::vector<Cell> images(cells);
  std::iota(images.begin(), images.end(), Cell{0});
  std::vector<Cell> col;
  const auto height = static_cast<std::size_t>(tower.height);
  const auto block = static_cast<std::size_t>(n0);
  for (std::size_t k = 0; k < tower.base_cells.size(); ++k) {
    column(t0, tower.base_cells[k], tower.height, col);
    if (k < gamma_cells) {
      for (std::size_t i = 0; i < height; ++i) images[col[i]] = col[(i + 1) % height];
    } else {
      for (std::size_t i = 0; i < height; ++i) {
        images[col[i]] = (i + 1) % block == 0 ? col[i + 1 - block] : col[i + 1];
      }
    }
  }
  return DyadicPermutation(t0.resolution(), std::move(images));
}

}  // namespace

PerturbationResult whirly_perturb(const DyadicPermutation& t0_in, const DyadicSet& a_in,
                                  const DyadicSet& b_in, const PerturbationParams& params) {
  params.validate();
  const int r = std::max({t0_in.resolution(), a_in.resolution(), b_in.resolution()});
  detail::require_block_precision(r, params.m);
  const DyadicPermutation t0 = t0_in.refine(r);
  const DyadicSet a = a_in.refine(r);
  const DyadicSet b = b_in.refine(r);
  if (a.is_empty() || b.is_empty()) throw InvalidInput("perturbation needs non-null A and B");

  PerturbationResult result;
  auto& diag = result.diagnostics;
  const auto fail = [&](PerturbationStatus status, std::string message) {
    result.status = status;
    result.message = std::move(message);
    diag.log.push_back(result.message);
    return result;
  };

  diag.mixing_score = mixing_score(t0, params.mixing_horizon, {{a, b}});
  diag.log.push_back("mixing score " + to_string(diag.mixing_score));
  if (diag.mixing_score > params.mixing_threshold) {
    return fail(PerturbationStatus::kNoMixing,
                "mixing score " + to_string(diag.mixing_score) + " exceeds threshold " +
                    to_string(params.mixing_threshold));
  }

  // Step 1: return time n₀.
  const CycleIndex cycles(t0);
  const std::vector<Cell> a_cells = a.cells();
  const std::uint64_t ab = a.count() * b.count();
  std::int64_t n0 = 0;
  std::uint64_t hits = 0;
  for (std::int64_t k = params.min_return_time(); k <= params.horizon; ++k) {
    hits = 0;
    for (Cell x : a_cells) hits += b.contains(cycles.apply_power(x, k)) ? 1 : 0;
    if ((static_cast<unsigned __int128>(hits) << (r + 1)) > ab) {
      n0 = k;
      break;
    }
  }
  if (n0 == 0) {
    return fail(PerturbationStatus::kNoMixing,
                "no n0 in [" + std::to_string(params.min_return_time()) + ", " +
                    std::to_string(params.horizon) + "] with mu(T0^n0 A & B) > mu(A)mu(B)/2");
  }
  diag.return_intersection = dyadic_measure(hits, r);
  diag.log.push_back("n0 = " + std::to_string(n0) + ", mu(T0^n0 A & B) = " +
                     to_string(diag.return_intersection));
  DyadicSet d(r);
  for (Cell x : a_cells) {
    const Cell y = cycles.apply_power(x, n0);
    if (b.contains(y)) d.insert(y);
  }

  // Steps 2-3: block count n. Admissible means the tower of height n·n₀ exists with
  // remainder < ε/2 and at least 4^m columns.
  const Rational half_eps = params.epsilon / 2;
  const std::uint64_t min_columns = std::uint64_t{1} << (2 * params.m);
  const auto admissible = [&](std::int64_t n) {
    const std::int64_t height = n * n0;
    if (height > static_cast<std::int64_t>(t0.cell_count())) return false;
    const Rational rem = minimal_remainder(cycles, height);
    if (rem >= half_eps) return false;
    const Integer covered = numerator((1 - rem) * pow2(r));
    return covered / Integer(height) >= Integer(min_columns);
  };
  std::vector<std::int64_t> candidates;
  for (std::int64_t n = 2; n * n0 <= static_cast<std::int64_t>(t0.cell_count()); n *= 2) {
    if (admissible(n)) candidates.push_back(n);
  }
  if (candidates.empty()) {
    return fail(PerturbationStatus::kTowerInfeasible,
                "no block count n = 2^k gives a tower of height n*n0 with remainder < eps/2 and "
                ">= 4^m columns");
  }
  std::int64_t blocks = 0;
  Rational best_fraction = -1;
  for (std::int64_t n : candidates) {
    const FrequencyOutcome f = frequency_test(cycles, d, params.m, n, params.eta);
    diag.log.push_back("frequency window " + std::to_string(n) + ": good fraction " +
                       to_string(f.good_fraction));
    if (f.passed) {
      blocks = n;
      diag.frequency_good_fraction = f.good_fraction;
      diag.frequency_passed = true;
      break;
    }
    if (f.good_fraction > best_fraction) best_fraction = f.good_fraction;
  }
  if (blocks == 0) {
    if (params.strict_frequency) {
      return fail(PerturbationStatus::kFrequencyFailure,
                  "no admissible window reaches a good fraction of 1 - eta; best " +
                      to_string(best_fraction));
    }
    blocks = candidates.front();
    diag.frequency_good_fraction = frequency_test(cycles, d, params.m, blocks, params.eta).good_fraction;
    diag.log.push_back("frequency test not met; using the shortest admissible tower, n = " +
                       std::to_string(blocks));
  }
  diag.frequency_window = blocks;

  // Steps 3-6 with retries on a failed certificate.
  const Rational gamma = params.gamma_value();
  const Rational delta = params.delta_value();
  std::optional<WhirlyCertificate> last;
  for (int attempt = 0; attempt <= params.retry_cap; ++attempt, blocks *= 2) {
    const std::int64_t height = blocks * n0;
    if (height > static_cast<std::int64_t>(t0.cell_count()) || !admissible(blocks)) {
      diag.log.push_back("attempt " + std::to_string(attempt) + ": n = " + std::to_string(blocks) +
                         " not admissible");
      continue;
    }
    ++diag.attempts;
    const Tower tower = rohlin_tower(t0, height, half_eps);
    const std::uint64_t gamma_cells = ceil_fraction(gamma, tower.base_cells.size());
    diag.remainder = tower.remainder_measure();
    diag.base_cells = tower.base_cells.size();
    diag.gamma_cells = gamma_cells;

    WhirlyCertificate cert;
    cert.m = params.m;
    cert.epsilon = params.epsilon;
    cert.gamma = gamma;
    cert.delta = delta;
    cert.n0 = n0;
    cert.height = height;
    cert.blocks = blocks;
    cert.t0 = t0;
    cert.s = build_s(t0, tower, gamma_cells, n0);
    cert.a = a;
    cert.b = b;
    cert.closeness = uniform_dist(cert.s, t0);
    const DyadicPermutation sn0 = power(cert.s, n0);
    const BlockDefects defects = block_defects(sn0, params.m);
    cert.um_defect = defects.worst_defect();
    cert.um_worst_block = defects.worst_block;
    cert.bound_lhs = (push_forward(sn0, a) & b).measure();
    cert.bound_rhs = delta * a.measure() * b.measure();
    diag.log.push_back("attempt " + std::to_string(attempt) + ": N = " + std::to_string(height) +
                       ", closeness " + to_string(cert.closeness) + ", U_m defect " +
                       to_string(cert.um_defect) + ", bound " + to_string(cert.bound_lhs) + " vs " +
                       to_string(cert.bound_rhs));
    const bool ok = cert.inequalities_hold();
    last = std::move(cert);
    if (ok) {
      result.status = PerturbationStatus::kCertified;
      result.message = "certified";
      result.certificate = std::move(last);
      return result;
    }
  }
  if (!last) {
    return fail(PerturbationStatus::kTowerInfeasible, "every retry exceeded the tower limits");
  }
  result.certificate = std::move(last);
  return fail(PerturbationStatus::kCertificateFailure,
              "constructed S misses an inequality after " + std::to_string(diag.attempts) +
                  " attempts");
}

std::optional<std::int64_t> v_km_member(const DyadicPermutation& t, const DyadicSet& a,
                                        const DyadicSet& b, int m, std::int64_t search_bound,
                                        std::optional<Rational> delta, bool allow_zero,
                                        unsigned threads) {
  if (a.is_empty() || b.is_empty()) throw InvalidInput("V_km test needs non-null A and B");
  if (search_bound < 0) throw InvalidInput("search bound must be non-negative");
  const int r = std::max({t.resolution(), a.resolution(), b.resolution()});
  detail::require_block_precision(r, m);
  const Rational d = delta.value_or(pow2(-2 * m) / 10);
  if (d <= 0) throw InvalidInput("delta must be positive");
  const CycleIndex cycles(t.refine(r));
  const std::vector<Cell> a_cells = a.refine(r).cells();
  const DyadicSet bn = b.refine(r);
  // hits/2^r > δ|A||B|/4^r  ⇔  hits > floor(δ|A||B|/2^r)
  const Rational threshold = d * Integer(a_cells.size()) * Integer(bn.count()) / pow2(r);
  const auto floor_threshold =
      (numerator(threshold) / denominator(threshold)).convert_to<std::uint64_t>();
  const std::uint64_t count = 2 * static_cast<std::uint64_t>(search_bound) + 1;
  const auto hit = first_match(count, threads, [&](std::uint64_t i) {
    const std::int64_t k = signed_order_exponent(i);
    if (k == 0 && !allow_zero) return false;
    std::uint64_t hits = 0;
    for (Cell x : a_cells) {
      if (bn.contains(cycles.apply_power(x, k)) && ++hits > floor_threshold) break;
    }
    return hits > floor_threshold && power_in_block_neighborhood(cycles, k, m);
  });
  if (!hit) return std::nullopt;
  return signed_order_exponent(*hit);
}

namespace {

DyadicSet cyclic_range(int resolution, std::uint64_t start, std::uint64_t length) {
  const std::uint64_t cells = std::uint64_t{1} << resolution;
  DyadicSet out(resolution);
  for (std::uint64_t i = 0; i < length; ++i) out.insert(static_cast<Cell>((start + i) % cells));
  return out;
}

std::string seeded_spec(const std::string& spec, std::uint64_t seed) {
  if (spec.rfind("rand:", 0) == 0 && spec.find("seed=") == std::string::npos) {
    return spec + ":seed=" + std::to_string(seed);
  }
  return spec;
}

}  // namespace

std::vector<SetPair> scan_pairs(int resolution, std::size_t count, PairKind kind,
                                std::uint64_t seed) {
  if (resolution < 2) throw InvalidInput("scan pairs need resolution >= 2");
  const std::uint64_t cells = std::uint64_t{1} << resolution;
  const std::uint64_t quarter = cells / 4;
  SplitMix64 rng(seed);
  std::vector<SetPair> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    switch (kind) {
      case PairKind::kIntervals:
        out.emplace_back(cyclic_range(resolution, rng.below(cells), quarter),
                         cyclic_range(resolution, rng.below(cells), quarter));
        break;
      case PairKind::kDisjointIntervals: {
        const std::uint64_t start = rng.below(cells);
        out.emplace_back(cyclic_range(resolution, start, quarter),
                         cyclic_range(resolution, start + 2 * quarter, quarter));
        break;
      }
      case PairKind::kRandomSets: {
        const std::uint64_t sa = rng.next();
        const std::uint64_t sb = rng.next();
        out.emplace_back(random_set(resolution, cells / 2, sa), random_set(resolution, cells / 2, sb));
        break;
      }
    }
  }
  return out;
}

std::vector<ScanRow> generic_scan(const ScanConfig& config) {
  if (config.samplers.empty()) throw InvalidInput("scan needs at least one sampler");
  if (config.pair_count == 0) throw InvalidInput("scan needs at least one pair");
  if (config.m_max < 1) throw InvalidInput("scan needs m_max >= 1");
  SplitMix64 seeds(config.seed);
  std::vector<ScanRow> rows;
  for (const std::string& spec : config.samplers) {
    const std::uint64_t sampler_seed = seeds.next();
    const DyadicPermutation t = parse_generator(seeded_spec(spec, sampler_seed));
    const auto pairs = scan_pairs(t.resolution(), config.pair_count, config.pairs, config.seed);
    for (int m = 1; m <= config.m_max; ++m) {
      ScanRow row{spec, m, 0, pairs.size(), Rational(0)};
      for (const auto& [a, b] : pairs) {
        if (v_km_member(t, a, b, m, config.search_bound, std::nullopt, config.allow_zero,
                        config.threads)) {
          ++row.passes;
        }
      }
      row.pass_rate = Rational(Integer(row.passes), Integer(row.pairs));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace dyadic
