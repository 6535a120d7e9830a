#include "quantlets/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "quantlets/errors.hpp"

namespace quantlets {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& context,
                    std::size_t row) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(context + ": non-numeric cell '" + s + "' at row " +
                          std::to_string(row));
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& col_names,
                      const std::vector<std::string>& row_keys,
                      const std::string& key_name) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out.precision(17);
  if (!row_keys.empty()) out << key_name << ",";
  for (std::size_t c = 0; c < col_names.size(); ++c)
    out << col_names[c] << (c + 1 < col_names.size() ? "," : "");
  out << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!row_keys.empty()) out << row_keys[r] << ",";
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << m(r, c) << (c + 1 < m.cols() ? "," : "");
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path,
                                std::vector<std::string>* col_names,
                                std::vector<std::string>* row_keys) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ValidationError("empty CSV: " + path);
  const auto header = split_csv_line(lines[0]);
  const bool has_key = row_keys != nullptr;
  const std::size_t n_cols = header.size() - (has_key ? 1 : 0);
  if (col_names) {
    col_names->assign(header.begin() + (has_key ? 1 : 0), header.end());
  }
  Eigen::MatrixXd m(lines.size() - 1, n_cols);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != header.size())
      throw ValidationError(path + ": ragged row " + std::to_string(r + 1));
    if (has_key) row_keys->push_back(cells[0]);
    for (std::size_t c = 0; c < n_cols; ++c)
      m(r - 1, c) = parse_double(cells[c + (has_key ? 1 : 0)], path, r + 1);
  }
  return m;
}

std::vector<SampleSet> read_samples_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ValidationError("empty samples CSV: " + path);
  const auto header = split_csv_line(lines[0]);
  if (header.size() != 2 || header[0] != "subject_id" || header[1] != "value")
    throw ValidationError(path + ": expected header subject_id,value");

  std::vector<SampleSet> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> values;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != 2)
      throw ValidationError(path + ": ragged row " + std::to_string(r + 1));
    const double v = parse_double(cells[1], path, r + 1);
    auto [it, inserted] = index.try_emplace(cells[0], values.size());
    if (inserted) {
      out.push_back({cells[0], {}});
      values.emplace_back();
    }
    values[it->second].push_back(v);
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].values = Eigen::Map<Eigen::VectorXd>(values[i].data(),
                                                values[i].size());
  return out;
}

void write_samples_csv(const std::string& path,
                       const std::vector<SampleSet>& samples) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out.precision(17);
  out << "subject_id,value\n";
  for (const auto& s : samples)
    for (Eigen::Index j = 0; j < s.values.size(); ++j)
      out << s.subject_id << "," << s.values[j] << "\n";
}

CovariateTable read_covariates_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ValidationError("empty covariates CSV: " + path);
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "subject_id")
    throw ValidationError(path +
                          ": expected header subject_id,<name1>,...");
  CovariateTable t;
  t.names.assign(header.begin() + 1, header.end());
  t.values.resize(lines.size() - 1, t.names.size());
  std::set<std::string> seen;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != header.size())
      throw ValidationError(path + ": ragged row " + std::to_string(r + 1));
    if (!seen.insert(cells[0]).second)
      throw ValidationError(path + ": duplicate covariate row for subject '" +
                            cells[0] + "'");
    t.subject_ids.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c)
      t.values(r - 1, c - 1) = parse_double(cells[c], path, r + 1);
  }
  return t;
}

std::pair<std::vector<SampleSet>, DesignMatrix> ingest(
    const std::string& samples_path, const std::string& covariates_path) {
  auto samples = read_samples_csv(samples_path);
  const CovariateTable cov = read_covariates_csv(covariates_path);

  std::map<std::string, Eigen::Index> cov_row;
  for (std::size_t i = 0; i < cov.subject_ids.size(); ++i)
    cov_row[cov.subject_ids[i]] = static_cast<Eigen::Index>(i);

  std::string missing_cov, missing_samples;
  std::set<std::string> sampled;
  for (const auto& s : samples) {
    sampled.insert(s.subject_id);
    if (!cov_row.count(s.subject_id))
      missing_cov += (missing_cov.empty() ? "" : ", ") + s.subject_id;
  }
  for (const auto& id : cov.subject_ids)
    if (!sampled.count(id))
      missing_samples += (missing_samples.empty() ? "" : ", ") + id;
  if (!missing_cov.empty())
    throw ValidationError("subjects without covariates: " + missing_cov);
  if (!missing_samples.empty())
    throw ValidationError("covariate rows without samples: " + missing_samples);

  const bool has_intercept =
      !cov.names.empty() &&
      (cov.names[0] == "intercept" ||
       (cov.values.col(0).array() == 1.0).all());
  const Eigen::Index A =
      static_cast<Eigen::Index>(cov.names.size()) + (has_intercept ? 0 : 1);
  Eigen::MatrixXd X(samples.size(), A);
  std::vector<std::string> names;
  if (!has_intercept) names.push_back("intercept");
  names.insert(names.end(), cov.names.begin(), cov.names.end());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Eigen::Index r = cov_row.at(samples[i].subject_id);
    Eigen::Index c = 0;
    if (!has_intercept) X(i, c++) = 1.0;
    for (Eigen::Index j = 0; j < cov.values.cols(); ++j)
      X(i, c++) = cov.values(r, j);
  }
  return {std::move(samples), make_design(std::move(X), std::move(names))};
}

void write_selection_csv(const std::string& path,
                         const std::vector<SelectionResult>& selections) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out.precision(17);
  out << "subject_id,lambda,element_index,coefficient\n";
  for (const auto& s : selections)
    for (int k : s.selected)
      out << s.subject_id << "," << s.lambda << "," << k << ","
          << s.coefficients[k] << "\n";
}

std::vector<SelectionResult> read_selection_csv(const std::string& path,
                                                Eigen::Index n_elements) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ValidationError("empty selection CSV: " + path);
  std::vector<SelectionResult> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != 4)
      throw ValidationError(path + ": ragged row " + std::to_string(r + 1));
    auto [it, inserted] = index.try_emplace(cells[0], out.size());
    if (inserted) {
      SelectionResult s;
      s.subject_id = cells[0];
      s.lambda = parse_double(cells[1], path, r + 1);
      s.coefficients = Eigen::VectorXd::Zero(n_elements);
      out.push_back(std::move(s));
    }
    auto& s = out[it->second];
    const int k = static_cast<int>(parse_double(cells[2], path, r + 1));
    s.selected.push_back(k);
    s.coefficients[k] = parse_double(cells[3], path, r + 1);
  }
  return out;
}

void write_curve_csv(const std::string& path, const LosslessnessCurve& curve) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out.precision(17);
  out << "C,K,rho_min,rho_mean\n";
  for (std::size_t i = 0; i < curve.threshold.size(); ++i)
    out << curve.threshold[i] << "," << curve.k_c[i] << "," << curve.rho_min[i]
        << "," << curve.rho_mean[i] << "\n";
}

LosslessnessCurve read_curve_csv(const std::string& path) {
  const auto lines = read_lines(path);
  LosslessnessCurve c;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != 4)
      throw ValidationError(path + ": ragged row " + std::to_string(r + 1));
    c.threshold.push_back(static_cast<int>(parse_double(cells[0], path, r)));
    c.k_c.push_back(static_cast<int>(parse_double(cells[1], path, r)));
    c.rho_min.push_back(parse_double(cells[2], path, r));
    c.rho_mean.push_back(parse_double(cells[3], path, r));
  }
  return c;
}

void write_dictionary(const std::string& csv_path,
                      const std::string& manifest_path, const Dictionary& d) {
  std::ofstream out(csv_path);
  if (!out) throw ValidationError("cannot write file: " + csv_path);
  out.precision(17);
  out << "element_index,kind,a,b\n";
  for (std::size_t k = 0; k < d.elements.size(); ++k) {
    const auto& e = d.elements[k];
    const char* kind = e.kind == DictionaryElement::Kind::Constant ? "constant"
                       : e.kind == DictionaryElement::Kind::Gaussian
                           ? "gaussian"
                           : "beta";
    out << k << "," << kind << "," << e.a << "," << e.b << "\n";
  }
  json manifest;
  manifest["seed"] = d.seed;
  manifest["theta_lo"] = d.theta_lo;
  manifest["theta_hi"] = d.theta_hi;
  manifest["k_over"] = d.elements.size() - 2;
  manifest["grid_size"] = d.grid.size();
  manifest["grid_lo"] = d.grid.size() ? d.grid[0] : 0.0;
  manifest["grid_hi"] = d.grid.size() ? d.grid[d.grid.size() - 1] : 0.0;
  manifest["redraws"] = d.redraws;
  write_text(manifest_path, manifest.dump(2));
}

void write_basis(const std::string& csv_path, const std::string& manifest_path,
                 const QuantletBasis& basis) {
  std::vector<std::string> cols;
  for (int k = 1; k <= basis.K(); ++k) cols.push_back("psi" + std::to_string(k));
  std::vector<std::string> keys;
  for (Eigen::Index j = 0; j < basis.grid.size(); ++j)
    keys.push_back(format_double(basis.grid[j]));
  write_matrix_csv(csv_path, basis.psi, cols, keys, "p");

  json m;
  m["K"] = basis.K();
  m["L"] = basis.grid.size();
  m["threshold_c"] = basis.threshold_c;
  m["epsilon"] = basis.epsilon;
  m["seed"] = basis.seed;
  m["source_hash"] = basis.source_hash;
  m["energies"] = std::vector<double>(basis.energies.data(),
                                      basis.energies.data() + basis.K());
  m["variability"] = std::vector<double>(
      basis.variability.data(), basis.variability.data() + basis.variability.size());
  m["element_index"] = basis.element_index;
  m["dropped_dependent"] = basis.dropped_dependent;
  m["dropped_denoised"] = basis.dropped_denoised;
  m["cluster_labels"] = basis.cluster_labels;
  m["matrix_hash"] = file_hash(csv_path);
  write_text(manifest_path, m.dump(2));
}

QuantletBasis read_basis(const std::string& csv_path,
                         const std::string& manifest_path) {
  QuantletBasis b;
  std::vector<std::string> cols, keys;
  b.psi = read_matrix_csv(csv_path, &cols, &keys);
  b.grid.resize(keys.size());
  for (std::size_t j = 0; j < keys.size(); ++j)
    b.grid[j] = std::stod(keys[j]);
  const json m = json::parse(read_text(manifest_path));
  b.threshold_c = m.at("threshold_c").get<int>();
  b.epsilon = m.at("epsilon").get<double>();
  b.seed = m.at("seed").get<std::uint64_t>();
  b.source_hash = m.value("source_hash", "");
  const auto en = m.at("energies").get<std::vector<double>>();
  b.energies = Eigen::Map<const Eigen::VectorXd>(en.data(), en.size());
  const auto vb = m.value("variability", std::vector<double>{});
  b.variability = Eigen::Map<const Eigen::VectorXd>(vb.data(), vb.size());
  b.element_index = m.at("element_index").get<std::vector<int>>();
  b.dropped_dependent = m.at("dropped_dependent").get<std::vector<int>>();
  b.dropped_denoised = m.at("dropped_denoised").get<std::vector<int>>();
  b.cluster_labels = m.value("cluster_labels", std::vector<int>{});
  // psi_perp / dc are construction-time artifacts, not persisted
  return b;
}

void write_coefficients_csv(const std::string& path,
                            const QuantletCoefficients& qc) {
  std::vector<std::string> cols;
  for (Eigen::Index k = 1; k <= qc.qstar.cols(); ++k)
    cols.push_back("q" + std::to_string(k));
  cols.push_back("reconstruction_ccc");
  Eigen::MatrixXd m(qc.qstar.rows(), qc.qstar.cols() + 1);
  m.leftCols(qc.qstar.cols()) = qc.qstar;
  m.col(qc.qstar.cols()) = qc.reconstruction_ccc;
  write_matrix_csv(path, m, cols, qc.subject_ids, "subject_id");
}

void write_draws_csv(const std::string& path, const PosteriorFit& fit) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out.precision(17);
  out << "draw,a,k,value\n";
  for (int m = 0; m < fit.n_draws(); ++m) {
    for (Eigen::Index a = 0; a < fit.A(); ++a)
      for (Eigen::Index k = 0; k < fit.K(); ++k)
        out << m << "," << a + 1 << "," << k + 1 << "," << fit.bstar[m](a, k)
            << "\n";
    for (Eigen::Index k = 0; k < fit.sigma2.cols(); ++k)
      out << m << ",0," << k + 1 << "," << fit.sigma2(m, k) << "\n";
  }
}

void write_fit(const std::string& draws_path, const std::string& config_path,
               const std::string& geweke_path, const PosteriorFit& fit) {
  write_draws_csv(draws_path, fit);

  json cfg;
  cfg["method"] = fit_method_name(fit.method);
  cfg["iterations"] = fit.config.iterations;
  cfg["burn_in"] = fit.config.burn_in;
  cfg["thin"] = fit.config.thin;
  cfg["nu0"] = fit.config.nu0;
  cfg["seed"] = fit.config.seed;
  cfg["flat_prior"] = fit.config.flat_prior;
  cfg["n_clusters"] = fit.partition.n_clusters;
  cfg["cluster_labels"] = fit.partition.label;
  cfg["moments_direct"] = fit.moments_direct;
  cfg["A"] = fit.A();
  cfg["K"] = fit.K();
  write_text(config_path, cfg.dump(2));

  if (!fit.moments_direct) {
    const Eigen::MatrixXd p = geweke_pvalues(fit);
    std::ofstream out(geweke_path);
    out.precision(17);
    out << "a,k,geweke_p\n";
    for (Eigen::Index a = 0; a < p.rows(); ++a)
      for (Eigen::Index k = 0; k < p.cols(); ++k)
        out << a + 1 << "," << k + 1 << "," << p(a, k) << "\n";
  }
}

PosteriorFit read_fit(const std::string& draws_path,
                      const std::string& config_path) {
  const json cfg = json::parse(read_text(config_path));
  PosteriorFit fit;
  fit.method = fit_method_from_name(cfg.at("method").get<std::string>()[0]);
  fit.config.iterations = cfg.at("iterations").get<int>();
  fit.config.burn_in = cfg.at("burn_in").get<int>();
  fit.config.thin = cfg.at("thin").get<int>();
  fit.config.nu0 = cfg.at("nu0").get<double>();
  fit.config.seed = cfg.at("seed").get<std::uint64_t>();
  fit.config.flat_prior = cfg.at("flat_prior").get<bool>();
  fit.moments_direct = cfg.at("moments_direct").get<bool>();
  fit.partition.label = cfg.at("cluster_labels").get<std::vector<int>>();
  fit.partition.n_clusters = cfg.at("n_clusters").get<int>();
  const Eigen::Index A = cfg.at("A").get<Eigen::Index>();
  const Eigen::Index K = cfg.at("K").get<Eigen::Index>();

  const int M = fit.config.iterations / fit.config.thin;
  fit.bstar.assign(M, Eigen::MatrixXd::Zero(A, K));
  fit.sigma2.resize(M, K);
  fit.sigma2.setZero();
  const auto lines = read_lines(draws_path);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != 4)
      throw ValidationError(draws_path + ": ragged row " + std::to_string(r));
    const int m = static_cast<int>(parse_double(cells[0], draws_path, r));
    const int a = static_cast<int>(parse_double(cells[1], draws_path, r));
    const int k = static_cast<int>(parse_double(cells[2], draws_path, r));
    const double v = parse_double(cells[3], draws_path, r);
    if (a == 0)
      fit.sigma2(m, k - 1) = v;
    else
      fit.bstar[m](a - 1, k - 1) = v;
  }
  return fit;
}

}  // namespace quantlets
