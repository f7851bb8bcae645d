#pragma once

#include <string>

#include <json.hpp>

#include "c2data/query_engine.hpp"
#include "c2data/sat_engine.hpp"

namespace c2data {

// .model files: "domain: e0,e1,...", one positive atom per line (closed
// world), and "const c -> e0" mapping lines.
std::string write_model(const Structure& A);
Structure read_model(const std::string& text);

nlohmann::json structure_to_json(const Structure& A);
nlohmann::json star_to_json(const SignatureStar& s, const StarType& st);
nlohmann::json frame_to_json(const SignatureStar& s, const Frame& f);
nlohmann::json certificate_to_json(const SatCertificate& cert, const NormalTheoryC2& t);
nlohmann::json trace_to_json(const PipelineTrace& trace);

}  // namespace c2data
