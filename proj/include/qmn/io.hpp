#pragma once

#include <string>

#include <json.hpp>

#include "qmn/darbo.hpp"
#include "qmn/ensemble.hpp"
#include "qmn/hammerstein.hpp"
#include "qmn/noncompactness.hpp"

namespace qmn {

// Round-trip exact decimal for a double, stable across runs.
std::string format_double(double value);

// Ensemble CSV layout: a name header row, a value row describing the grid
// and codomain, then one node-major value row per member.
std::string ensemble_to_csv(const FunctionEnsemble& ensemble);
FunctionEnsemble ensemble_from_csv_text(const std::string& text);
FunctionEnsemble read_ensemble_csv(const std::string& path);
void write_ensemble_csv(const std::string& path, const FunctionEnsemble& ensemble);

void write_text_file(const std::string& path, const std::string& content);

nlohmann::ordered_json measure_to_json(const QuasimeasureReport& report);
nlohmann::ordered_json axioms_to_json(const AxiomSuiteReport& report);
nlohmann::ordered_json trace_to_json(const DarboTrace& trace);
nlohmann::ordered_json certificate_to_json(const CertificateReport& report);
nlohmann::ordered_json contraction_to_json(const ContractionReport& report);
nlohmann::ordered_json picard_to_json(const PicardResult& result);

std::string measure_to_csv(const QuasimeasureReport& report);
std::string axioms_to_csv(const AxiomSuiteReport& report);
std::string trace_to_csv(const DarboTrace& trace);

}  // namespace qmn
