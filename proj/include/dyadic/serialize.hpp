#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "dyadic/dyadic_set.hpp"
#include "dyadic/ip_whirly.hpp"
#include "dyadic/perturbation.hpp"
#include "dyadic/permutation.hpp"
#include "dyadic/stable_sets.hpp"
#include "dyadic/step_function.hpp"
#include "dyadic/tower.hpp"
#include "dyadic/whirly_search.hpp"

namespace dyadic {

using Json = nlohmann::ordered_json;

Json to_json(const Rational& value);
Rational rational_from_json(const Json& j);

/// {"resolution": n, "hex": "..."}
Json to_json(const DyadicSet& set);
DyadicSet set_from_json(const Json& j);

/// {"resolution": n, "values": ["p/q", ...]}
Json to_json(const StepFunction& f);
StepFunction step_function_from_json(const Json& j);

/// {"resolution": n, "images": [...]}
Json to_json(const DyadicPermutation& t);
DyadicPermutation permutation_from_json(const Json& j);

/// {"transform": <ref>, "base": set, "height": N, "remainder_measure": "p/q"}
Json to_json(const Tower& tower, const std::string& transform_ref);

Json to_json(const WhirlyCertificate& cert);
WhirlyCertificate certificate_from_json(const Json& j);
/// Checks the raw image arrays for bijectivity before decoding, so a corrupted
/// permutation is reported as a "bijectivity" violation instead of a parse error.
VerificationReport verify_certificate_json(const Json& j);

Json to_json(const Witness& witness);
Json to_json(const NeighborhoodSpec& spec);
Json to_json(const IPPrefix& prefix);
Json to_json(const UrysohnResult& result);

/// Set descriptions accepted on the command line, at the given resolution:
///  "empty", "full", "hex:<bitmap>", "rand:<p/q>:<seed>" (exactly floor(p/q·2^n) cells),
///  or a union of half-open intervals "[0,1/4)∪[1/2,5/8)" ("U" or "+" also separate).
DyadicSet parse_set_spec(std::string_view spec, int resolution);

}  // namespace dyadic
