#include "qmn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qmn/errors.hpp"

namespace qmn {

namespace {

using nlohmann::ordered_json;

constexpr const char* kEnsembleHeader = "dim,half_width,points_per_axis,codomain_dim";

[[noreturn]] void csv_error(std::size_t row, const std::string& what) {
  throw ValidationError("ensemble csv: row " + std::to_string(row) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field_double(const std::string& field, std::size_t row, std::size_t col) {
  std::size_t used = 0;
  double value;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception&) {
    csv_error(row, "field " + std::to_string(col) + " is not a number: \"" + field + "\"");
  }
  if (used != field.size()) {
    csv_error(row, "field " + std::to_string(col) + " has trailing characters: \"" + field +
                       "\"");
  }
  return value;
}

std::size_t parse_field_count(const std::string& field, std::size_t row, std::size_t col) {
  double v = parse_field_double(field, row, col);
  if (!(v >= 0.0) || v != std::floor(v)) {
    csv_error(row, "field " + std::to_string(col) + " must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string ensemble_to_csv(const FunctionEnsemble& ensemble) {
  const Grid& grid = *ensemble.grid();
  std::string out = kEnsembleHeader;
  out += '\n';
  out += std::to_string(grid.dim()) + ',' + format_double(grid.half_width()) + ',' +
         std::to_string(grid.points_per_axis()) + ',' +
         std::to_string(ensemble.codomain_dim()) + '\n';
  for (const auto& member : ensemble.members()) {
    const auto& values = member.values();
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) row += ',';
      row += format_double(values[i]);
    }
    out += row;
    out += '\n';
  }
  return out;
}

FunctionEnsemble ensemble_from_csv_text(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  if (lines.size() < 3) {
    throw ValidationError("ensemble csv: need a header, a grid row and at least one member");
  }
  if (lines[0] != kEnsembleHeader) {
    csv_error(1, std::string("expected header \"") + kEnsembleHeader + "\"");
  }
  auto grid_fields = split_fields(lines[1]);
  if (grid_fields.size() != 4) csv_error(2, "expected 4 grid fields");
  std::size_t dim = parse_field_count(grid_fields[0], 2, 1);
  double half_width = parse_field_double(grid_fields[1], 2, 2);
  std::size_t points = parse_field_count(grid_fields[2], 2, 3);
  std::size_t codomain = parse_field_count(grid_fields[3], 2, 4);
  if (codomain == 0) csv_error(2, "codomain_dim must be positive");

  GridPtr grid = make_grid(dim, half_width, points);
  const std::size_t expected = grid->num_nodes() * codomain;

  std::vector<SampledFunction> members;
  for (std::size_t r = 2; r < lines.size(); ++r) {
    if (lines[r].empty()) csv_error(r + 1, "empty row");
    auto fields = split_fields(lines[r]);
    if (fields.size() != expected) {
      csv_error(r + 1, "expected " + std::to_string(expected) + " values, got " +
                           std::to_string(fields.size()));
    }
    std::vector<double> values(expected);
    for (std::size_t c = 0; c < expected; ++c) {
      values[c] = parse_field_double(fields[c], r + 1, c + 1);
    }
    members.emplace_back(grid, codomain, std::move(values));
  }
  return FunctionEnsemble(grid, std::move(members));
}

FunctionEnsemble read_ensemble_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("ensemble csv: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ensemble_from_csv_text(buf.str());
}

void write_ensemble_csv(const std::string& path, const FunctionEnsemble& ensemble) {
  write_text_file(path, ensemble_to_csv(ensemble));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw NumericalError("short write to " + path);
}

ordered_json measure_to_json(const QuasimeasureReport& report) {
  ordered_json out;
  out["eta_value"] = report.eta_value;
  out["omega0_value"] = report.omega0_value;
  out["chi0_value"] = report.chi0_value;
  out["omega_total"] = report.omega_total;
  out["omega_table"] = {{"deltas", report.omega_table.deltas},
                        {"values", report.omega_table.values}};
  ordered_json chi = ordered_json::array();
  for (const auto& entry : report.chi_table.table) {
    chi.push_back(
        {{"level", entry.level}, {"eps", entry.eps}, {"value", entry.value}});
  }
  out["chi_table"] = chi;
  return out;
}

ordered_json axioms_to_json(const AxiomSuiteReport& report) {
  ordered_json out;
  out["seed"] = report.seed;
  out["trials"] = report.trials;
  out["adversarial"] = report.adversarial;
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"id", c.id},
                      {"failures", c.failures},
                      {"informational", c.informational},
                      {"note", c.note},
                      {"passed", c.passed()}});
  }
  out["checks"] = checks;
  out["all_passed"] = report.all_passed();
  return out;
}

ordered_json trace_to_json(const DarboTrace& trace) {
  ordered_json out;
  out["probe_nodes"] = trace.probe_nodes;
  ordered_json steps = ordered_json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"index", s.index},
                     {"eta", s.eta},
                     {"omega0", s.omega0},
                     {"chi0", s.chi0},
                     {"omega_total", s.omega_total},
                     {"kappa", s.kappa},
                     {"picard_residual", s.picard_residual},
                     {"dh_to_final", s.dh_to_final}});
  }
  out["steps"] = steps;
  return out;
}

ordered_json certificate_to_json(const CertificateReport& report) {
  return ordered_json{{"steps", report.steps},
                      {"omega_violations", report.omega_violations},
                      {"kappa_violations", report.kappa_violations},
                      {"lipschitz_violations", report.lipschitz_violations},
                      {"kappa_informational", report.kappa_informational},
                      {"passed", report.passed}};
}

ordered_json contraction_to_json(const ContractionReport& report) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json row;
    row["chi0_input"] = r.chi0_input;
    row["chi0_image"] = r.chi0_image;
    if (r.skipped) {
      row["ratio"] = nullptr;
    } else {
      row["ratio"] = r.ratio;
    }
    row["skipped"] = r.skipped;
    rows.push_back(row);
  }
  return ordered_json{
      {"rows", rows}, {"max_ratio", report.max_ratio}, {"flagged", report.flagged}};
}

ordered_json picard_to_json(const PicardResult& result) {
  return ordered_json{{"iterations", result.iterations},
                      {"converged", result.converged},
                      {"residuals", result.residuals},
                      {"aposteriori_bound", result.aposteriori_bound}};
}

std::string measure_to_csv(const QuasimeasureReport& report) {
  std::string out = "quantity,level,scale,value\n";
  out += "eta,,," + format_double(report.eta_value) + '\n';
  for (std::size_t i = 0; i < report.omega_table.deltas.size(); ++i) {
    out += "omega,," + format_double(report.omega_table.deltas[i]) + ',' +
           format_double(report.omega_table.values[i]) + '\n';
  }
  out += "omega0,,," + format_double(report.omega0_value) + '\n';
  for (const auto& entry : report.chi_table.table) {
    out += "chi," + std::to_string(entry.level) + ',' + format_double(entry.eps) + ',' +
           format_double(entry.value) + '\n';
  }
  out += "chi0,,," + format_double(report.chi0_value) + '\n';
  out += "omega_total,,," + format_double(report.omega_total) + '\n';
  return out;
}

std::string axioms_to_csv(const AxiomSuiteReport& report) {
  std::string out = "check,failures,informational,passed\n";
  for (const auto& c : report.checks) {
    out += c.id + ',' + std::to_string(c.failures) + ',' +
           std::to_string(c.informational) + ',' + (c.passed() ? "1" : "0") + '\n';
  }
  return out;
}

std::string trace_to_csv(const DarboTrace& trace) {
  std::string out = "step,eta,omega0,chi0,omega_total,kappa,picard_residual,dh_to_final\n";
  for (const auto& s : trace.steps) {
    out += std::to_string(s.index) + ',' + format_double(s.eta) + ',' +
           format_double(s.omega0) + ',' + format_double(s.chi0) + ',' +
           format_double(s.omega_total) + ',' + format_double(s.kappa) + ',' +
           format_double(s.picard_residual) + ',' + format_double(s.dh_to_final) + '\n';
  }
  return out;
}

}  // namespace qmn
