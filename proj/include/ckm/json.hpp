#pragma once

#include <json.hpp>

#include "ckm/constraints.hpp"
#include "ckm/extension.hpp"
#include "ckm/oracle.hpp"
#include "ckm/params.hpp"
#include "ckm/reduction.hpp"
#include "ckm/sampler.hpp"

namespace ckm {

using Json = nlohmann::ordered_json;

/// Flat object: every resolved field, the thresholds, `overridden`,
/// `violations` and `faithful`.
Json to_json(const ParameterSet& ps);
/// Re-resolves from `epsilon` and the overridden fields, so the result is
/// identical to the serialized set.
ParameterSet params_from_json(const Json& j);

Json to_json(const FailureBudget& fb);
Json to_json(const CandidatePair& c);
Json to_json(const CandidateView& c);
CandidatePair candidate_from_json(const Json& j);
Json to_json(const SamplerReport& r, bool with_timings);
Json to_json(const PartitionResult& r);
Json to_json(const AnalysisProbe& p);
Json to_json(const LemmaReport& r);
Json to_json(const IdentityReport& r);
Json to_json(const ExtensionParams& x);
Json to_json(const FrameworkReport& r);

}  // namespace ckm
