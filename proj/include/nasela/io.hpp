#pragma once

// File formats: CSV design matrices, evaluated DOEs and feature tables; JSON
// design spaces. Reals are written in shortest round-trip form.

#include "nasela/analysis.hpp"
#include "nasela/clustering.hpp"
#include "nasela/design_space.hpp"
#include "nasela/ela_features.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nasela::io {

using json = nlohmann::ordered_json;

std::string format_double(double value);
/// Throws SchemaError mentioning `where` on malformed input.
double parse_double(std::string_view text, const std::string& where);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// -- design spaces --------------------------------------------------------------

json space_to_json(const DesignSpace& space);
DesignSpace space_from_json(const json& doc);
DesignSpace read_space_file(const std::filesystem::path& path);
/// "initial", "reduced", or a path to a JSON space document.
DesignSpace resolve_space(const std::string& spec);

// -- design matrices ----------------------------------------------------------

void write_design_csv(std::ostream& out, const Matrix& X, const DesignSpace& space);

/// Reads an EvaluatedDoe: the space's parameter columns, then accuracy,
/// optional cpu_time and optional dataset. Diagnostics name row and column.
EvaluatedDoe read_evaluated_doe(const CsvTable& table, const DesignSpace& space);
EvaluatedDoe read_evaluated_doe_file(const std::filesystem::path& path, const DesignSpace& space);
void write_evaluated_doe(std::ostream& out, const EvaluatedDoe& doe, const DesignSpace& space);

// -- feature tables -----------------------------------------------------------

struct FeatureRecord {
  std::string dataset;
  int replicate = 0;
  LandscapeFeatures features;
};

void write_feature_csv(std::ostream& out, const std::vector<FeatureRecord>& rows);
void write_bbob_feature_csv(std::ostream& out, const std::vector<int>& fids,
                            const std::vector<int>& instances,
                            const std::vector<LandscapeFeatures>& rows);

json features_to_json(const LandscapeFeatures& f);

/// Rows of either feature schema, with a per-row leaf label and group.
/// dataset/replicate rows: label "<dataset>#<replicate>", group "<dataset>";
/// fid/instance rows: label "bbob-f<fid>-i<instance>", group "bbob-f<fid>".
struct FeatureTable {
  std::vector<std::string> labels;
  std::vector<std::string> groups;
  Matrix values;

  void append(const FeatureTable& other);
};

FeatureTable read_feature_table(const CsvTable& table);
FeatureTable read_feature_table_file(const std::filesystem::path& path);

// -- analysis exports ---------------------------------------------------------

void write_correlation_csv(std::ostream& out, const CorrelationReport& report);
json densities_to_json(const std::vector<ParameterDensity>& densities);
json dendrogram_to_json(const Dendrogram& dendrogram);

} // namespace nasela::io
