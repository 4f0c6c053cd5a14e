#include "nasela/cli.hpp"

#include "nasela/analysis.hpp"
#include "nasela/bbob.hpp"
#include "nasela/clustering.hpp"
#include "nasela/errors.hpp"
#include "nasela/io.hpp"
#include "nasela/parallel.hpp"
#include "nasela/rng.hpp"
#include "nasela/sampling.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <set>

namespace nasela::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

/// Opens `path` for writing; "-" means the command's regular output stream.
class Output {
public:
  Output(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path == "-") {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw SchemaError("cannot open '" + path + "' for writing");
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }
  bool is_file() const { return path_ != "-"; }

private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Sidecar "<out>.manifest.json" describing how `out` was produced.
void write_manifest(const std::string& out_path, const std::string& command,
                    const std::vector<std::string>& args, json extra) {
  if (out_path == "-") return;
  json doc = {{"command", command},
              {"tool", "nasela"},
              {"tool_version", kToolVersion},
              {"arguments", args},
              {"output", out_path},
              {"created_utc", timestamp()}};
  for (auto& [k, v] : extra.items()) doc[k] = v;
  std::ofstream f(out_path + ".manifest.json", std::ios::trunc);
  f << doc.dump(2) << '\n';
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message, json context = {}) {
  json doc = {{"error", kind}, {"message", message}};
  if (!context.is_null())
    for (auto& [k, v] : context.items()) doc[k] = v;
  err << doc.dump() << '\n';
}

struct BootstrapSpec {
  std::size_t size = 0;
  std::size_t reps = 0;
};

BootstrapSpec parse_bootstrap(const std::string& text) {
  static const std::regex pattern(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, pattern))
    throw InvalidArgument("--bootstrap expects SIZExREPS, e.g. 800x30");
  return {std::stoul(m[1]), std::stoul(m[2])};
}

std::uint64_t ic_seed(std::uint64_t seed, int replicate) {
  return derive_seed(seed, 0x1c'0000ULL + static_cast<std::uint64_t>(replicate));
}

json space_summary(const std::string& spec) { return spec; }

// -- doe ----------------------------------------------------------------------

struct DoeOptions {
  std::string space = "initial";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string out = "-";
};

int cmd_doe(const DoeOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const DesignSpace space = io::resolve_space(o.space);
  const DoePlan plan{space, o.n, o.seed};
  const Matrix continuous = lhs_continuous(plan);
  const bool stratified = check_stratification(continuous, space);
  const Matrix X = round_integers(continuous, space);
  {
    Output file(o.out, out);
    io::write_design_csv(file.stream(), X, space);
  }
  write_manifest(o.out, "doe", args,
                 {{"seed", o.seed}, {"space", space_summary(o.space)}, {"n", o.n},
                  {"stratification_check", stratified ? "pass" : "fail"}});
  if (o.out != "-")
    out << "stratification check: " << (stratified ? "pass" : "FAIL") << " (" << o.n << " rows x "
        << space.size() << " columns)\n";
  return stratified ? 0 : 1;
}

// -- features -----------------------------------------------------------------

struct FeaturesOptions {
  std::string input;
  std::string space = "initial";
  std::string bootstrap;
  std::string dataset;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out = "-";
};

int cmd_features(const FeaturesOptions& o, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  const DesignSpace space = io::resolve_space(o.space);
  EvaluatedDoe doe = io::read_evaluated_doe_file(o.input, space);
  const std::string dataset = o.dataset.empty() ? doe.dataset_label : o.dataset;
  const MinimizationSample full(rescale_to_box(doe.X, space), orient_for_minimization(doe.accuracy));

  std::vector<std::vector<Eigen::Index>> subsets;
  std::vector<int> replicate_ids;
  if (o.bootstrap.empty()) {
    subsets.emplace_back();
    replicate_ids.push_back(0);
  } else {
    const auto spec = parse_bootstrap(o.bootstrap);
    const BootstrapPlan plan{spec.size, spec.reps, o.seed};
    subsets = bootstrap_indices(static_cast<std::size_t>(full.size()), plan);
    for (std::size_t r = 0; r < subsets.size(); ++r) replicate_ids.push_back(static_cast<int>(r + 1));
  }

  std::vector<std::optional<LandscapeFeatures>> results(subsets.size());
  std::vector<std::optional<std::pair<std::string, std::string>>> failures(subsets.size());
  parallel_for(subsets.size(), o.threads, [&](std::size_t r) {
    try {
      IcSettings ic;
      ic.seed = ic_seed(o.seed, replicate_ids[r]);
      results[r] = subsets[r].empty() ? compute_all(full, ic) : compute_all(full.subset(subsets[r]), ic);
    } catch (const Error& e) {
      failures[r] = {e.kind(), e.what()};
    }
  });

  std::vector<io::FeatureRecord> rows;
  std::size_t failed = 0;
  for (std::size_t r = 0; r < subsets.size(); ++r) {
    if (results[r]) {
      rows.push_back({dataset, replicate_ids[r], *results[r]});
    } else {
      ++failed;
      emit_error(err, failures[r]->first, failures[r]->second,
                 {{"dataset", dataset}, {"replicate", replicate_ids[r]}});
    }
  }
  {
    Output file(o.out, out);
    io::write_feature_csv(file.stream(), rows);
  }
  write_manifest(o.out, "features", args,
                 {{"seed", o.seed},
                  {"space", space_summary(o.space)},
                  {"input", o.input},
                  {"dataset", dataset},
                  {"bootstrap", o.bootstrap.empty() ? json(nullptr) : json(o.bootstrap)},
                  {"rows", rows.size()},
                  {"failed_replicates", failed},
                  {"conventions", {{"distr.kurtosis", "excess"}, {"y", "negated accuracy"},
                                   {"rescaled_box", {-5, 5}}}}});
  return rows.empty() ? 1 : 0;
}

// -- bbob ---------------------------------------------------------------------

struct BbobOptions {
  Eigen::Index dim = 23;
  int instances = 20;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::vector<int> fids;
  unsigned threads = 0;
  std::string out = "-";
};

int cmd_bbob(const BbobOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  bbob::FeatureTableSettings s;
  s.dim = o.dim;
  s.instances = o.instances;
  s.n = o.n;
  s.seed = o.seed;
  s.fids = o.fids;
  s.threads = o.threads;
  const auto rows = bbob::feature_table(s);
  std::vector<int> fids, instances;
  std::vector<LandscapeFeatures> features;
  for (const auto& r : rows) {
    fids.push_back(r.fid);
    instances.push_back(r.instance);
    features.push_back(r.features);
  }
  {
    Output file(o.out, out);
    io::write_bbob_feature_csv(file.stream(), fids, instances, features);
  }
  write_manifest(o.out, "bbob", args,
                 {{"seed", o.seed}, {"dim", o.dim}, {"instances", o.instances}, {"n", o.n},
                  {"rows", rows.size()}, {"conventions", {{"distr.kurtosis", "excess"}}}});
  return 0;
}

// -- cluster ------------------------------------------------------------------

/// Mean vector per group, in order of first appearance.
io::FeatureTable aggregate_by_group(const io::FeatureTable& t) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<Vector, int>> acc;
  for (std::size_t i = 0; i < t.groups.size(); ++i) {
    auto [it, inserted] = acc.try_emplace(t.groups[i], Vector::Zero(t.values.cols()), 0);
    if (inserted) order.push_back(t.groups[i]);
    it->second.first += t.values.row(static_cast<Eigen::Index>(i)).transpose();
    ++it->second.second;
  }
  io::FeatureTable out;
  out.values.resize(static_cast<Eigen::Index>(order.size()), t.values.cols());
  for (std::size_t g = 0; g < order.size(); ++g) {
    const auto& [sum, count] = acc.at(order[g]);
    out.values.row(static_cast<Eigen::Index>(g)) = (sum / count).transpose();
    out.labels.push_back(order[g]);
    out.groups.push_back(order[g]);
  }
  return out;
}

io::FeatureTable load_tables(const std::vector<std::string>& inputs) {
  io::FeatureTable table;
  for (const auto& path : inputs) table.append(io::read_feature_table_file(path));
  return table;
}

struct ClusterOptions {
  std::vector<std::string> inputs;
  Eigen::Index cut = 0;
  bool no_standardize = false;
  bool aggregate = false;
  std::string labels_out;
  std::string out = "-";
};

int cmd_cluster(const ClusterOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  io::FeatureTable table = load_tables(o.inputs);
  if (o.aggregate) table = aggregate_by_group(table);
  const Dendrogram dendro = hierarchical_cluster(table.values, table.labels, !o.no_standardize);
  json doc = io::dendrogram_to_json(dendro);
  doc["groups"] = table.groups;
  std::optional<double> pure;
  if (o.cut > 0) {
    const auto labels = cut(dendro, o.cut);
    pure = purity(labels, table.groups);
    doc["cut"] = {{"num_clusters", o.cut}, {"purity", *pure}, {"labels", labels}};
    if (!o.labels_out.empty()) {
      Output file(o.labels_out, out);
      io::write_csv_row(file.stream(), {"leaf", "label", "group", "cluster"});
      for (std::size_t i = 0; i < labels.size(); ++i)
        io::write_csv_row(file.stream(), {std::to_string(i), table.labels[i], table.groups[i],
                                          std::to_string(labels[i])});
    }
  }
  {
    Output file(o.out, out);
    file.stream() << doc.dump(2) << '\n';
  }
  write_manifest(o.out, "cluster", args,
                 {{"inputs", o.inputs}, {"standardize", !o.no_standardize}, {"aggregate", o.aggregate},
                  {"leaves", table.labels.size()}});
  if (pure && o.out != "-") out << "purity at " << o.cut << " clusters: " << io::format_double(*pure) << '\n';
  return 0;
}

// -- mds ----------------------------------------------------------------------

struct DoeInputOptions {
  std::string input;
  std::string space = "initial";
  std::size_t k = 50;
  std::string out = "-";
};

int cmd_mds(const DoeInputOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const DesignSpace space = io::resolve_space(o.space);
  const EvaluatedDoe doe = io::read_evaluated_doe_file(o.input, space);
  // Reuses the sample validation for its duplicate-row diagnostic.
  const MinimizationSample sample(rescale_to_box(doe.X, space), doe.accuracy);
  const Embedding2D emb = classical_mds_points(sample.X(), 2);
  {
    Output file(o.out, out);
    io::write_csv_row(file.stream(), {"label", "mds_1", "mds_2", "accuracy"});
    for (Eigen::Index i = 0; i < emb.coordinates.rows(); ++i)
      io::write_csv_row(file.stream(), {std::to_string(i), io::format_double(emb.coordinates(i, 0)),
                                        io::format_double(emb.coordinates(i, 1)),
                                        io::format_double(doe.accuracy(i))});
  }
  write_manifest(o.out, "mds", args,
                 {{"input", o.input}, {"space", space_summary(o.space)},
                  {"eigenvalues", {emb.eigenvalues(0), emb.eigenvalues(1)}},
                  {"captured_fraction", emb.captured_fraction},
                  {"clamped_mass", emb.clamped_mass}});
  return 0;
}

int cmd_correlate(const DoeInputOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const DesignSpace space = io::resolve_space(o.space);
  const auto report = pearson_correlations(io::read_evaluated_doe_file(o.input, space), space);
  {
    Output file(o.out, out);
    io::write_correlation_csv(file.stream(), report);
  }
  write_manifest(o.out, "correlate", args, {{"input", o.input}, {"space", space_summary(o.space)}});
  return 0;
}

int cmd_reduce(const DoeInputOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const DesignSpace space = io::resolve_space(o.space);
  const auto reduced = reduce_range(io::read_evaluated_doe_file(o.input, space), space, o.k);
  {
    Output file(o.out, out);
    file.stream() << io::space_to_json(reduced).dump(2) << '\n';
  }
  write_manifest(o.out, "reduce", args,
                 {{"input", o.input}, {"space", space_summary(o.space)}, {"k", o.k}, {"rule", "top-k min/max"}});
  return 0;
}

int cmd_densities(const DoeInputOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const DesignSpace space = io::resolve_space(o.space);
  const auto dens = top_k_densities(io::read_evaluated_doe_file(o.input, space), space, o.k);
  {
    Output file(o.out, out);
    file.stream() << io::densities_to_json(dens).dump(2) << '\n';
  }
  write_manifest(o.out, "densities", args,
                 {{"input", o.input}, {"space", space_summary(o.space)}, {"k", o.k},
                  {"kernel", "gaussian"}, {"bandwidth", "silverman"}});
  return 0;
}

// -- knn ----------------------------------------------------------------------

struct KnnOptions {
  std::vector<std::string> inputs;
  std::vector<std::string> queries;
  std::string reference_prefix;
  Eigen::Index k = 20;
  bool no_standardize = false;
  std::string out = "-";
};

int cmd_knn(const KnnOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const io::FeatureTable table = load_tables(o.inputs);
  Matrix values = table.values;
  if (!o.no_standardize) values = standardize_columns(values).values;

  auto is_reference = [&](const std::string& group) {
    return !o.reference_prefix.empty() && group.rfind(o.reference_prefix, 0) == 0;
  };
  std::vector<std::string> queries = o.queries;
  if (queries.empty()) {
    std::set<std::string> seen;
    for (const auto& g : table.groups)
      if (!is_reference(g) && seen.insert(g).second) queries.push_back(g);
  }
  json doc = json::object();
  for (const auto& q : queries) {
    std::vector<bool> reference(table.groups.size());
    for (std::size_t i = 0; i < reference.size(); ++i)
      reference[i] = table.groups[i] != q && (o.reference_prefix.empty() || is_reference(table.groups[i]));
    const auto stats = knn_distance_stats(values, table.groups, q, reference, o.k);
    doc[q] = {{"foreign_knn", {{"mean", stats.foreign_knn.mean}, {"sd", stats.foreign_knn.sd}}},
              {"neighbour_self_knn",
               {{"mean", stats.neighbour_self_knn.mean}, {"sd", stats.neighbour_self_knn.sd}}}};
  }
  {
    Output file(o.out, out);
    file.stream() << doc.dump(2) << '\n';
  }
  write_manifest(o.out, "knn", args,
                 {{"inputs", o.inputs}, {"k", o.k}, {"standardize", !o.no_standardize},
                  {"reference_prefix", o.reference_prefix}});
  return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exploratory landscape analysis of architecture search spaces", "nasela"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  DoeOptions doe;
  auto* doe_cmd = app.add_subcommand("doe", "Latin hypercube design over a design space");
  doe_cmd->add_option("--space", doe.space, "initial | reduced | path to space JSON")->capture_default_str();
  doe_cmd->add_option("--n", doe.n, "Number of designs")->capture_default_str()->check(CLI::PositiveNumber);
  doe_cmd->add_option("--seed", doe.seed)->capture_default_str();
  doe_cmd->add_option("--out", doe.out, "Output CSV ('-' for stdout)")->capture_default_str();

  FeaturesOptions feat;
  auto* feat_cmd = app.add_subcommand("features", "Landscape features of an evaluated DOE");
  feat_cmd->add_option("--input", feat.input, "Evaluated DOE CSV")->required();
  feat_cmd->add_option("--space", feat.space)->capture_default_str();
  feat_cmd->add_option("--bootstrap", feat.bootstrap, "SIZExREPS subsampling, e.g. 800x30");
  feat_cmd->add_option("--dataset", feat.dataset, "Dataset label (default: CSV column or file stem)");
  feat_cmd->add_option("--seed", feat.seed)->capture_default_str();
  feat_cmd->add_option("--threads", feat.threads, "Worker threads (0 = all cores)")->capture_default_str();
  feat_cmd->add_option("--out", feat.out)->capture_default_str();

  BbobOptions bb;
  auto* bbob_cmd = app.add_subcommand("bbob", "Landscape features of the BBOB suite");
  bbob_cmd->add_option("--dim", bb.dim)->capture_default_str()->check(CLI::Range(2, 1000));
  bbob_cmd->add_option("--instances", bb.instances)->capture_default_str()->check(CLI::PositiveNumber);
  bbob_cmd->add_option("--n", bb.n)->capture_default_str()->check(CLI::PositiveNumber);
  bbob_cmd->add_option("--fids", bb.fids, "Subset of function ids (default: 1..24)")->delimiter(',');
  bbob_cmd->add_option("--seed", bb.seed)->capture_default_str();
  bbob_cmd->add_option("--threads", bb.threads)->capture_default_str();
  bbob_cmd->add_option("--out", bb.out)->capture_default_str();

  ClusterOptions cl;
  auto* cluster_cmd = app.add_subcommand("cluster", "Complete-linkage clustering of feature tables");
  cluster_cmd->add_option("inputs", cl.inputs, "Feature CSV files")->required()->check(CLI::ExistingFile);
  cluster_cmd->add_option("--cut", cl.cut, "Report labels and purity for this many clusters");
  cluster_cmd->add_flag("--no-standardize", cl.no_standardize, "Cluster raw feature values");
  cluster_cmd->add_flag("--aggregate", cl.aggregate, "Cluster the mean vector of each group");
  cluster_cmd->add_option("--labels-out", cl.labels_out, "CSV of leaf cluster labels (needs --cut)");
  cluster_cmd->add_option("--out", cl.out)->capture_default_str();

  DoeInputOptions mds, corr, red, dens;
  auto add_doe_input = [](CLI::App* cmd, DoeInputOptions& o) {
    cmd->add_option("--input", o.input, "Evaluated DOE CSV")->required();
    cmd->add_option("--space", o.space)->capture_default_str();
    cmd->add_option("--out", o.out)->capture_default_str();
  };
  auto* mds_cmd = app.add_subcommand("mds", "2-D classical MDS embedding of a DOE");
  add_doe_input(mds_cmd, mds);
  auto* corr_cmd = app.add_subcommand("correlate", "Pearson correlation of parameters with responses");
  add_doe_input(corr_cmd, corr);
  auto* red_cmd = app.add_subcommand("reduce", "Reduced ranges from the top-k designs");
  add_doe_input(red_cmd, red);
  red_cmd->add_option("--k", red.k)->capture_default_str();
  auto* dens_cmd = app.add_subcommand("densities", "Top-k parameter densities and medians");
  add_doe_input(dens_cmd, dens);
  dens_cmd->add_option("--k", dens.k)->capture_default_str();

  KnnOptions knn;
  auto* knn_cmd = app.add_subcommand("knn", "Nearest-neighbour distance statistics between feature sets");
  knn_cmd->add_option("inputs", knn.inputs, "Feature CSV files")->required()->check(CLI::ExistingFile);
  knn_cmd->add_option("--query", knn.queries, "Query group(s) (default: every non-reference group)");
  knn_cmd->add_option("--reference-prefix", knn.reference_prefix,
                      "Restrict neighbours to groups starting with this prefix, e.g. bbob");
  knn_cmd->add_option("--k", knn.k)->capture_default_str();
  knn_cmd->add_flag("--no-standardize", knn.no_standardize);
  knn_cmd->add_option("--out", knn.out)->capture_default_str();

  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "UsageError", e.what());
    return 2;
  }

  try {
    if (*doe_cmd) return cmd_doe(doe, args, out);
    if (*feat_cmd) return cmd_features(feat, args, out, err);
    if (*bbob_cmd) return cmd_bbob(bb, args, out);
    if (*cluster_cmd) return cmd_cluster(cl, args, out);
    if (*mds_cmd) return cmd_mds(mds, args, out);
    if (*corr_cmd) return cmd_correlate(corr, args, out);
    if (*red_cmd) return cmd_reduce(red, args, out);
    if (*dens_cmd) return cmd_densities(dens, args, out);
    if (*knn_cmd) return cmd_knn(knn, args, out);
  } catch (const FeatureError& e) {
    json failures = json::array();
    for (const auto& f : e.failures())
      failures.push_back({{"family", f.family}, {"kind", f.kind}, {"message", f.message}});
    emit_error(err, e.kind(), e.what(), {{"failures", failures}});
    return 1;
  } catch (const Error& e) {
    emit_error(err, e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error(err, "InternalError", e.what());
    return 1;
  }
  return 2;
}

} // namespace nasela::cli
