#include "mcgpp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "mcgpp/errors.hpp"

namespace mcgpp {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  }

  // Columns "<prefix>1", "<prefix>2", ... in index order; gaps are an error.
  std::vector<std::size_t> indexed(const std::string& prefix) const {
    std::map<int, std::size_t> found;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string& h = header[c];
      if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) continue;
      const std::string rest = h.substr(prefix.size());
      if (!std::all_of(rest.begin(), rest.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
        continue;
      found[std::stoi(rest)] = c;
    }
    std::vector<std::size_t> cols;
    int expect = 1;
    for (const auto& [k, c] : found) {
      if (k != expect) throw DataError("column " + prefix + std::to_string(expect) + " is missing");
      cols.push_back(c);
      ++expect;
    }
    return cols;
  }
};

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    ++record;
    if (fields.size() != table.header.size())
      throw DataError("expected " + std::to_string(table.header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      record);
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw DataError("empty CSV input");
  return table;
}

double number_at(const CsvTable& t, std::size_t row, std::size_t col) {
  const auto v = parse_double(t.rows[row][col]);
  if (!v || !std::isfinite(*v))
    throw DataError("column " + t.header[col] + ": '" + t.rows[row][col] + "' is not a number",
                    row + 1);
  return *v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Vector r = m.row(i).transpose();
    rows.push_back(vec_json(r));
  }
  return rows;
}

Vector json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix json_mat(const json& j, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Vector r = json_vec(j.at(static_cast<std::size_t>(i)));
    if (r.size() != cols) throw DataError("fitted-model file: ragged matrix");
    m.row(i) = r.transpose();
  }
  return m;
}

json kernel_json(CovFamily family, const KernelParams& k) {
  json j{{"family", std::string(to_string(family))}, {"v", k.v}, {"A", mat_json(k.A)}};
  j["shape"] = k.shape ? json(*k.shape) : json(nullptr);
  return j;
}

json theta_json(const Hyperparams& theta) {
  struct Visitor {
    json operator()(const MCGPHyperparams& t) const {
      return {{"model", "mcgpp"},
              {"xi1", kernel_json(t.shared_family, t.xi1)},
              {"xi2", kernel_json(t.shared_family, t.xi2)},
              {"eta1", kernel_json(t.eta1.family, t.eta1.params)},
              {"eta2", kernel_json(t.eta2.family, t.eta2.params)}};
    }
    json operator()(const CDRHyperparams& t) const {
      return {{"model", "cdr"},
              {"k1", kernel_json(CovFamily::SquaredExponential, t.theta1)},
              {"alpha", t.alpha},
              {"sigma_eps2", t.sigma_eps2}};
    }
    json operator()(const IndepHyperparams& t) const {
      return {{"model", "indep"},
              {"k1", kernel_json(CovFamily::SquaredExponential, t.k1)},
              {"k2", kernel_json(CovFamily::SquaredExponential, t.k2)}};
    }
  };
  return std::visit(Visitor{}, theta);
}

json component_json(const ComponentData& c) {
  return {{"z", vec_json(c.z)},
          {"U", mat_json(c.U)},
          {"X", mat_json(c.X)},
          {"log_exposure", vec_json(c.log_exposure)},
          {"q", c.U.cols()},
          {"p", c.X.cols()}};
}

ComponentData component_from_json(const json& j) {
  ComponentData c;
  c.z = json_vec(j.at("z"));
  c.U = json_mat(j.at("U"), j.at("q").get<Eigen::Index>());
  c.X = json_mat(j.at("X"), j.at("p").get<Eigen::Index>());
  c.log_exposure = json_vec(j.at("log_exposure"));
  return c;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, bool add_intercept) {
  const CsvTable t = read_csv(in);
  const auto comp_col = t.column("component");
  const auto z_col = t.column("z");
  if (!comp_col) throw DataError("missing required column 'component'");
  if (!z_col) throw DataError("missing required column 'z'");
  const auto u_cols = t.indexed("u_");
  const auto x_cols = t.indexed("x_");
  const auto e_col = t.column("exposure");
  if (x_cols.empty()) throw DataError("missing required column 'x_1'");
  const Eigen::Index q = static_cast<Eigen::Index>(u_cols.size()) + (add_intercept ? 1 : 0);
  if (q == 0) throw DataError("no mean covariates: give u_ columns or allow the intercept");
  const Eigen::Index p = static_cast<Eigen::Index>(x_cols.size());

  std::vector<std::size_t> rows_of[2];
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double c = number_at(t, r, *comp_col);
    if (c != 1.0 && c != 2.0) throw DataError("component must be 1 or 2", r + 1);
    rows_of[c == 1.0 ? 0 : 1].push_back(r);
  }

  Dataset data;
  for (int a = 0; a < 2; ++a) {
    const auto& rows = rows_of[a];
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw DataError("component " + std::to_string(a + 1) + " has no rows");
    Vector z(n), E = Vector::Ones(n);
    Matrix U(n, q), X(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t r = rows[static_cast<std::size_t>(i)];
      const double zi = number_at(t, r, *z_col);
      if (zi < 0.0 || std::floor(zi) != zi)
        throw DataError("count '" + t.rows[r][*z_col] + "' is not a nonnegative integer", r + 1);
      z(i) = zi;
      Eigen::Index k = 0;
      if (add_intercept) U(i, k++) = 1.0;
      for (const auto c : u_cols) U(i, k++) = number_at(t, r, c);
      for (Eigen::Index j = 0; j < p; ++j) X(i, j) = number_at(t, r, x_cols[static_cast<std::size_t>(j)]);
      if (e_col) {
        E(i) = number_at(t, r, *e_col);
        if (!(E(i) > 0.0))
          throw DataError("exposure '" + t.rows[r][*e_col] + "' is not positive", r + 1);
      }
    }
    data.comp[a] = Dataset::make_component(std::move(z), std::move(U), std::move(X),
                                           e_col ? std::optional<Vector>(E) : std::nullopt);
  }
  data.validate();
  return data;
}

Dataset load_dataset(const std::filesystem::path& path, bool add_intercept) {
  auto in = open_input(path);
  return read_dataset_csv(in, add_intercept);
}

void write_dataset_csv(std::ostream& out, const Dataset& data, bool drop_first_u) {
  const Eigen::Index q = data.comp[0].U.cols();
  if (data.comp[1].U.cols() != q)
    throw DimensionError("dataset CSV needs the same number of covariates in both components");
  const Eigen::Index first = drop_first_u ? 1 : 0;
  const Eigen::Index p = data.dim();
  out << "component,z";
  for (Eigen::Index k = first; k < q; ++k) out << ",u_" << (k - first + 1);
  for (Eigen::Index j = 0; j < p; ++j) out << ",x_" << (j + 1);
  out << ",exposure\n";
  char buf[32];
  auto num = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  for (int a = 0; a < 2; ++a) {
    const auto& c = data.comp[a];
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      out << (a + 1) << ',' << num(c.z(i));
      for (Eigen::Index k = first; k < q; ++k) out << ',' << num(c.U(i, k));
      for (Eigen::Index j = 0; j < p; ++j) out << ',' << num(c.X(i, j));
      out << ',' << num(std::exp(c.log_exposure(i))) << '\n';
    }
  }
}

std::vector<NewPoint> read_points_csv(std::istream& in, bool add_intercept) {
  const CsvTable t = read_csv(in);
  auto pick = [&](const std::string& own, const std::string& shared) {
    auto cols = t.indexed(own);
    return cols.empty() ? t.indexed(shared) : cols;
  };
  const std::vector<std::size_t> u[2] = {pick("u1_", "u_"), pick("u2_", "u_")};
  const std::vector<std::size_t> x[2] = {pick("x1_", "x_"), pick("x2_", "x_")};
  if (x[0].empty() || x[1].empty()) throw DataError("points need x_ (or x1_ and x2_) columns");
  if (x[0].size() != x[1].size()) throw DataError("x1_ and x2_ column counts differ");
  const std::optional<std::size_t> e[2] = {t.column("exposure1"), t.column("exposure2")};

  std::vector<NewPoint> points;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    NewPoint pt;
    Vector* us[2] = {&pt.u1, &pt.u2};
    Vector* xs[2] = {&pt.x1, &pt.x2};
    double* les[2] = {&pt.log_exposure1, &pt.log_exposure2};
    for (int a = 0; a < 2; ++a) {
      const Eigen::Index off = add_intercept ? 1 : 0;
      us[a]->resize(static_cast<Eigen::Index>(u[a].size()) + off);
      if (add_intercept) (*us[a])(0) = 1.0;
      for (std::size_t k = 0; k < u[a].size(); ++k)
        (*us[a])(static_cast<Eigen::Index>(k) + off) = number_at(t, r, u[a][k]);
      if (us[a]->size() == 0) throw DataError("points carry no mean covariates");
      xs[a]->resize(static_cast<Eigen::Index>(x[a].size()));
      for (std::size_t j = 0; j < x[a].size(); ++j)
        (*xs[a])(static_cast<Eigen::Index>(j)) = number_at(t, r, x[a][j]);
      if (e[a]) {
        const double E = number_at(t, r, *e[a]);
        if (!(E > 0.0)) throw DataError("exposure is not positive", r + 1);
        *les[a] = std::log(E);
      }
    }
    points.push_back(std::move(pt));
  }
  return points;
}

std::vector<NewPoint> load_points(const std::filesystem::path& path, bool add_intercept) {
  auto in = open_input(path);
  return read_points_csv(in, add_intercept);
}

void write_predictions_csv(std::ostream& out, const std::vector<PredictionResult>& results) {
  out << "point,mean1,mean2,var1,var2,cross_cov\n";
  char buf[256];
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g,%.12g,%.12g\n", i + 1, r.mean(0),
                  r.mean(1), r.var(0, 0), r.var(1, 1), r.var(0, 1));
    out << buf;
  }
}

std::string model_to_json(const FittedModel& model, const Dataset& data) {
  const ParameterMap map(model.spec, data.comp[0].U.cols(), data.comp[1].U.cols(), data.dim());
  json j;
  j["format"] = "mcgpp-fitted-model";
  j["version"] = kModelFormatVersion;
  j["spec"] = {{"kind", std::string(to_string(model.spec.kind))},
               {"shared", std::string(to_string(model.spec.shared))},
               {"eta1", std::string(to_string(model.spec.eta1))},
               {"eta2", std::string(to_string(model.spec.eta2))},
               {"optimize_shape", model.spec.optimize_shape}};
  j["beta"] = {{"beta1", vec_json(model.beta.beta1)}, {"beta2", vec_json(model.beta.beta2)}};
  j["theta"] = theta_json(model.theta);
  j["param_names"] = map.names();
  j["params"] = vec_json(model.params);
  j["tau0"] = vec_json(model.tau0);
  j["loglik"] = model.loglik;
  j["n_params"] = model.n_params;
  j["aic"] = aic(model);
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  j["mode_options"] = {{"tol", model.mode_options.tol}, {"max_iter", model.mode_options.max_iter}};
  j["data"] = {{"component1", component_json(data.comp[0])},
               {"component2", component_json(data.comp[1])}};
  return j.dump(2) + "\n";
}

std::pair<FittedModel, Dataset> model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("fitted-model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "mcgpp-fitted-model") throw DataError("not a fitted-model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw DataError("unsupported fitted-model version " + std::to_string(version));

    Dataset data;
    data.comp[0] = component_from_json(j.at("data").at("component1"));
    data.comp[1] = component_from_json(j.at("data").at("component2"));
    data.validate();

    const json& s = j.at("spec");
    ModelSpec spec;
    spec.kind = model_kind_from_string(s.at("kind").get<std::string>());
    spec.shared = family_from_string(s.at("shared").get<std::string>());
    spec.eta1 = family_from_string(s.at("eta1").get<std::string>());
    spec.eta2 = family_from_string(s.at("eta2").get<std::string>());
    spec.optimize_shape = s.at("optimize_shape").get<bool>();

    const ParameterMap map(spec, data.comp[0].U.cols(), data.comp[1].U.cols(), data.dim());
    FittedModel model;
    model.spec = spec;
    model.params = json_vec(j.at("params"));
    if (model.params.size() != map.size())
      throw DataError("fitted-model file: parameter vector has the wrong length");
    model.beta = {json_vec(j.at("beta").at("beta1")), json_vec(j.at("beta").at("beta2"))};
    model.theta = map.theta(model.params);
    model.tau0 = json_vec(j.at("tau0"));
    model.loglik = j.at("loglik").get<double>();
    model.n_params = j.at("n_params").get<int>();
    model.converged = j.at("converged").get<bool>();
    model.iterations = j.at("iterations").get<int>();
    model.mode_options.tol = j.at("mode_options").at("tol").get<double>();
    model.mode_options.max_iter = j.at("mode_options").at("max_iter").get<int>();
    model.K_factor = chol_psd(latent_covariance(model.theta, data.inputs()));
    return {std::move(model), std::move(data)};
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed fitted-model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const FittedModel& model, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_json(model, data);
}

std::pair<FittedModel, Dataset> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

std::string model_summary(const FittedModel& model) {
  std::ostringstream out;
  out.precision(8);
  out << "model " << to_string(model.spec.kind);
  if (model.spec.kind == ModelKind::Mcgpp)
    out << " (shared " << to_string(model.spec.shared) << ", eta1 " << to_string(model.spec.eta1)
        << ", eta2 " << to_string(model.spec.eta2) << ")";
  out << "\nloglik " << model.loglik << "\nn_params " << model.n_params << "\naic "
      << aic(model) << "\nconverged " << (model.converged ? "yes" : "no") << "\niterations "
      << model.iterations << "\n";
  const Eigen::IOFormat row(Eigen::FullPrecision, Eigen::DontAlignCols, " ", " ");
  out << "beta1 " << model.beta.beta1.transpose().format(row) << "\n";
  out << "beta2 " << model.beta.beta2.transpose().format(row) << "\n";
  out << "theta\n" << theta_json(model.theta).dump(2) << "\n";
  return out.str();
}

}  // namespace mcgpp
