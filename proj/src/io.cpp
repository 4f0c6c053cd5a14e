#include "nasela/io.hpp"

#include "nasela/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nasela::io {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

double parse_double(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw SchemaError(where + ": cannot parse '" + std::string(text) + "' as a number");
  return v;
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  return in;
}

} // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (first) {
      t.header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != t.header.size())
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (first) throw SchemaError("CSV input has no header row");
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_csv(in);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote(fields[i]);
  }
  out << '\n';
}

// -- design spaces --------------------------------------------------------------

json space_to_json(const DesignSpace& space) {
  json params = json::array();
  for (const auto& p : space.parameters())
    params.push_back({{"name", p.name}, {"kind", std::string(to_string(p.kind))}, {"lo", p.lo}, {"hi", p.hi}});
  return {{"parameters", params}};
}

DesignSpace space_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("parameters") || !doc["parameters"].is_array())
    throw SchemaError("design space JSON needs a \"parameters\" array");
  std::vector<ParameterSpec> params;
  for (const auto& p : doc["parameters"]) {
    try {
      params.push_back({p.at("name").get<std::string>(), parse_param_kind(p.at("kind").get<std::string>()),
                        p.at("lo").get<double>(), p.at("hi").get<double>()});
    } catch (const json::exception& e) {
      throw SchemaError(std::string("malformed parameter entry: ") + e.what());
    }
  }
  return DesignSpace(std::move(params));
}

DesignSpace read_space_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return space_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

DesignSpace resolve_space(const std::string& spec) {
  if (spec == "initial") return builtin_space(BuiltinRange::initial);
  if (spec == "reduced") return builtin_space(BuiltinRange::reduced);
  return read_space_file(spec);
}

// -- design matrices ----------------------------------------------------------

void write_design_csv(std::ostream& out, const Matrix& X, const DesignSpace& space) {
  std::vector<std::string> fields;
  for (const auto& p : space.parameters()) fields.push_back(p.name);
  write_csv_row(out, fields);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    fields.clear();
    for (Eigen::Index j = 0; j < X.cols(); ++j) fields.push_back(format_double(X(i, j)));
    write_csv_row(out, fields);
  }
}

EvaluatedDoe read_evaluated_doe(const CsvTable& table, const DesignSpace& space) {
  std::vector<std::size_t> param_cols;
  for (const auto& p : space.parameters()) {
    const auto c = table.column(p.name);
    if (!c) throw SchemaError("missing parameter column '" + p.name + "'");
    param_cols.push_back(*c);
  }
  const auto acc_col = table.column("accuracy");
  if (!acc_col) throw SchemaError("missing required column 'accuracy'");
  const auto cpu_col = table.column("cpu_time");
  const auto ds_col = table.column("dataset");

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  EvaluatedDoe doe;
  doe.X.resize(n, static_cast<Eigen::Index>(space.size()));
  doe.accuracy.resize(n);
  if (cpu_col) doe.cpu_time = Vector(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const std::string where = "row " + std::to_string(i);
    for (std::size_t j = 0; j < param_cols.size(); ++j)
      doe.X(i, static_cast<Eigen::Index>(j)) =
          parse_double(row[param_cols[j]], where + ", column '" + space[j].name + "'");
    doe.accuracy(i) = parse_double(row[*acc_col], where + ", column 'accuracy'");
    if (cpu_col) (*doe.cpu_time)(i) = parse_double(row[*cpu_col], where + ", column 'cpu_time'");
    if (ds_col) {
      if (i == 0) doe.dataset_label = row[*ds_col];
      else if (row[*ds_col] != doe.dataset_label)
        throw SchemaError(where + ": mixed dataset labels '" + doe.dataset_label + "' and '" +
                          row[*ds_col] + "' in one file");
    }
  }
  doe.validate(space);
  return doe;
}

EvaluatedDoe read_evaluated_doe_file(const std::filesystem::path& path, const DesignSpace& space) {
  try {
    auto doe = read_evaluated_doe(read_csv_file(path), space);
    if (doe.dataset_label.empty()) doe.dataset_label = path.stem().string();
    return doe;
  } catch (const Error& e) {
    if (e.kind() == "SchemaError") throw SchemaError(path.string() + ": " + e.what());
    throw;
  }
}

void write_evaluated_doe(std::ostream& out, const EvaluatedDoe& doe, const DesignSpace& space) {
  std::vector<std::string> fields;
  for (const auto& p : space.parameters()) fields.push_back(p.name);
  fields.emplace_back("accuracy");
  if (doe.cpu_time) fields.emplace_back("cpu_time");
  fields.emplace_back("dataset");
  write_csv_row(out, fields);
  for (Eigen::Index i = 0; i < doe.rows(); ++i) {
    fields.clear();
    for (Eigen::Index j = 0; j < doe.X.cols(); ++j) fields.push_back(format_double(doe.X(i, j)));
    fields.push_back(format_double(doe.accuracy(i)));
    if (doe.cpu_time) fields.push_back(format_double((*doe.cpu_time)(i)));
    fields.push_back(doe.dataset_label);
    write_csv_row(out, fields);
  }
}

// -- feature tables -----------------------------------------------------------

void write_feature_csv(std::ostream& out, const std::vector<FeatureRecord>& rows) {
  std::vector<std::string> fields{"dataset", "replicate"};
  for (const auto name : feature_names()) fields.emplace_back(name);
  write_csv_row(out, fields);
  for (const auto& r : rows) {
    fields = {r.dataset, std::to_string(r.replicate)};
    for (const double v : r.features.values) fields.push_back(format_double(v));
    write_csv_row(out, fields);
  }
}

void write_bbob_feature_csv(std::ostream& out, const std::vector<int>& fids,
                            const std::vector<int>& instances,
                            const std::vector<LandscapeFeatures>& rows) {
  std::vector<std::string> fields{"fid", "instance"};
  for (const auto name : feature_names()) fields.emplace_back(name);
  write_csv_row(out, fields);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    fields = {std::to_string(fids[i]), std::to_string(instances[i])};
    for (const double v : rows[i].values) fields.push_back(format_double(v));
    write_csv_row(out, fields);
  }
}

json features_to_json(const LandscapeFeatures& f) {
  json out = json::object();
  for (std::size_t i = 0; i < kNumFeatures; ++i) out[std::string(feature_names()[i])] = f.values[i];
  return out;
}

void FeatureTable::append(const FeatureTable& other) {
  if (values.size() != 0 && other.values.cols() != values.cols())
    throw SchemaError("feature tables have different column counts");
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  groups.insert(groups.end(), other.groups.begin(), other.groups.end());
  Matrix merged(values.rows() + other.values.rows(), other.values.cols());
  if (values.rows() > 0) merged.topRows(values.rows()) = values;
  merged.bottomRows(other.values.rows()) = other.values;
  values = std::move(merged);
}

FeatureTable read_feature_table(const CsvTable& table) {
  std::vector<std::size_t> cols;
  for (const auto name : feature_names()) {
    const auto c = table.column(name);
    if (!c) throw SchemaError("missing feature column '" + std::string(name) + "'");
    cols.push_back(*c);
  }
  const auto ds = table.column("dataset");
  const auto rep = table.column("replicate");
  const auto fid = table.column("fid");
  const auto inst = table.column("instance");
  const bool nas_schema = ds && rep;
  if (!nas_schema && !(fid && inst))
    throw SchemaError("feature table needs dataset/replicate or fid/instance columns");

  FeatureTable out;
  out.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(kNumFeatures));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (nas_schema) {
      out.labels.push_back(row[*ds] + "#" + row[*rep]);
      out.groups.push_back(row[*ds]);
    } else {
      out.labels.push_back("bbob-f" + row[*fid] + "-i" + row[*inst]);
      out.groups.push_back("bbob-f" + row[*fid]);
    }
    for (std::size_t j = 0; j < cols.size(); ++j)
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(row[cols[j]], "row " + std::to_string(i) + ", column '" +
                                         std::string(feature_names()[j]) + "'");
  }
  return out;
}

FeatureTable read_feature_table_file(const std::filesystem::path& path) {
  try {
    return read_feature_table(read_csv_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

// -- analysis exports ---------------------------------------------------------

void write_correlation_csv(std::ostream& out, const CorrelationReport& report) {
  write_csv_row(out, {"parameter", "accuracy", "cpu_time"});
  for (std::size_t j = 0; j < report.parameters.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    write_csv_row(out, {report.parameters[j], report.defined(jj, 0) ? format_double(report.r(jj, 0)) : "",
                        report.defined(jj, 1) ? format_double(report.r(jj, 1)) : ""});
  }
}

json densities_to_json(const std::vector<ParameterDensity>& densities) {
  json out = json::object();
  for (const auto& d : densities) {
    json entry = {{"median", d.median}};
    if (d.curve) {
      entry["bandwidth"] = d.curve->bandwidth;
      entry["grid"] = std::vector<double>(d.curve->grid.begin(), d.curve->grid.end());
      entry["density"] = std::vector<double>(d.curve->density.begin(), d.curve->density.end());
    } else {
      entry["point_mass"] = *d.point_mass;
    }
    out[d.name] = std::move(entry);
  }
  return out;
}

json dendrogram_to_json(const Dendrogram& dendrogram) {
  json merges = json::array();
  for (const auto& m : dendrogram.merges)
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  return {{"linkage", "complete"},
          {"standardized", dendrogram.standardized},
          {"dropped_columns", dendrogram.dropped_columns},
          {"leaves", dendrogram.leaf_labels},
          {"merges", merges}};
}

} // namespace nasela::io
