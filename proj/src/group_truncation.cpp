#include "dyadic/group_truncation.hpp"

#include <map>
#include <set>

#include "dyadic/errors.hpp"

namespace dyadic {

GroupTruncation GroupTruncation::powers(const DyadicPermutation& t, std::int64_t bound) {
  if (bound < 0) throw InvalidInput("power bound must be non-negative");
  GroupTruncation g;
  g.resolution_ = t.resolution();
  auto cycles = std::make_shared<const CycleIndex>(t);
  const std::uint64_t span = 2 * static_cast<std::uint64_t>(bound) + 1;
  const std::optional<std::uint64_t> order = cycles->order(span);
  std::set<std::uint64_t> residues;
  for (std::uint64_t i = 0; i < span; ++i) {
    const std::int64_t k = i == 0 ? 0 : ((i % 2 == 1) ? static_cast<std::int64_t>((i + 1) / 2)
                                                        : -static_cast<std::int64_t>(i / 2));
    if (order) {
      const auto p = static_cast<std::int64_t>(*order);
      const auto r = static_cast<std::uint64_t>(((k % p) + p) % p);
      if (!residues.insert(r).second) continue;
    }
    g.exponents_.push_back(k);
    g.labels_.push_back("T^" + std::to_string(k));
  }
  g.cycles_ = std::move(cycles);
  return g;
}

GroupTruncation GroupTruncation::from_elements(std::vector<DyadicPermutation> elements,
                                               std::vector<std::string> labels) {
  if (elements.empty()) throw InvalidInput("group truncation needs at least one element");
  if (!labels.empty() && labels.size() != elements.size()) {
    throw InvalidInput("label count does not match element count");
  }
  int n = 0;
  for (const auto& e : elements) n = std::max(n, e.resolution());
  GroupTruncation g;
  g.resolution_ = n;
  std::map<std::vector<Cell>, std::size_t> seen;
  auto add = [&](DyadicPermutation p, std::string label) {
    if (p.resolution() != n) p = p.refine(n);
    std::vector<Cell> key(p.images().begin(), p.images().end());
    if (seen.count(key)) return;
    seen.emplace(std::move(key), g.explicit_.size());
    g.explicit_.push_back(std::move(p));
    g.labels_.push_back(std::move(label));
  };
  add(DyadicPermutation::identity(n), "id");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    add(elements[i], labels.empty() ? "g" + std::to_string(i) : labels[i]);
  }
  const std::size_t listed = g.explicit_.size();
  for (std::size_t i = 0; i < listed; ++i) {
    add(inverse(g.explicit_[i]), g.labels_[i] + "^-1");
  }
  return g;
}

GroupTruncation GroupTruncation::words(const std::vector<DyadicPermutation>& generators,
                                       int max_length) {
  if (generators.empty()) throw InvalidInput("words need at least one generator");
  if (max_length < 0) throw InvalidInput("word length must be non-negative");
  int n = 0;
  for (const auto& e : generators) n = std::max(n, e.resolution());
  std::vector<DyadicPermutation> letters;
  std::vector<std::string> letter_names;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    letters.push_back(generators[i].refine(n));
    letter_names.push_back("g" + std::to_string(i));
    letters.push_back(inverse(letters.back()));
    letter_names.push_back("g" + std::to_string(i) + "^-1");
  }
  std::vector<DyadicPermutation> all{DyadicPermutation::identity(n)};
  std::vector<std::string> names{"id"};
  std::set<std::vector<Cell>> seen{std::vector<Cell>(all[0].images().begin(), all[0].images().end())};
  std::size_t frontier_begin = 0;
  for (int len = 1; len <= max_length; ++len) {
    const std::size_t frontier_end = all.size();
    for (std::size_t w = frontier_begin; w < frontier_end; ++w) {
      for (std::size_t l = 0; l < letters.size(); ++l) {
        DyadicPermutation p = compose(letters[l], all[w]);
        std::vector<Cell> key(p.images().begin(), p.images().end());
        if (!seen.insert(std::move(key)).second) continue;
        names.push_back(letter_names[l] + (names[w] == "id" ? "" : "*" + names[w]));
        all.push_back(std::move(p));
      }
    }
    frontier_begin = frontier_end;
  }
  return from_elements(std::move(all), std::move(names));
}

std::optional<std::int64_t> GroupTruncation::exponent(std::size_t i) const {
  if (cycles_) return exponents_[i];
  return std::nullopt;
}

Cell GroupTruncation::apply(std::size_t i, Cell x) const {
  if (cycles_) return cycles_->apply_power(x, exponents_[i]);
  return explicit_[i](x);
}

DyadicPermutation GroupTruncation::element(std::size_t i) const {
  if (cycles_) return cycles_->power(exponents_[i]);
  return explicit_[i];
}

DyadicSet GroupTruncation::push(std::size_t i, const DyadicSet& a) const {
  const DyadicSet src = a.resolution() < resolution_ ? a.refine(resolution_) : a;
  if (src.resolution() > resolution_) return push_forward(element(i), src);
  DyadicSet out(resolution_);
  src.for_each_cell([&](Cell c) { out.insert(apply(i, c)); });
  return out;
}

}  // namespace dyadic
