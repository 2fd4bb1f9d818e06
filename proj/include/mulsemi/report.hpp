#pragma once

#include "mulsemi/discrete.hpp"
#include "mulsemi/stability.hpp"

#include <json.hpp>

#include <string>

namespace mulsemi {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kNormDescription = "operator 2-norm (largest singular value)";

/// Complex numbers serialize as [re, im]; non-finite reals as null.
Json to_json(const Complex& z);
Json number(double x);
Json to_json(const Witness& w);
Json to_json(const AnalysisOptions& o);
Json to_json(const DiscreteOptions& o);
Json to_json(const UniformResult& r);
Json to_json(const StrongResult& r);
Json to_json(const AlmostWeakResult& r);
Json to_json(const DiscreteReport& r);

/// Full report document: meta, uniform, strong, almost_weak and, when given,
/// discrete.
Json report_json(const StabilityReport& r, const std::string& config_hash,
                 const DiscreteReport* discrete = nullptr);

/// Fixed 17-significant-digit formatting used by every CSV writer.
std::string csv_number(double x);

}  // namespace mulsemi
