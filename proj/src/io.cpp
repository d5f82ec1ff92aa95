#include "ozf/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ozf::io {

namespace {

json matrix_rows(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const json& doc, const std::string& what) {
  if (!doc.is_array()) throw std::invalid_argument(what + ": expected an array of rows");
  const auto rows = doc.size();
  if (rows == 0) return Matrix(0, 0);
  const auto cols = doc[0].size();
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!doc[i].is_array() || doc[i].size() != cols)
      throw std::invalid_argument(what + ": ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) M(i, j) = doc[i][j].get<double>();
  }
  return M;
}

json matrix_sized(const Matrix& M) {
  json out;
  out["rows"] = M.rows();
  out["cols"] = M.cols();
  json data = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) data.push_back(M(i, j));
  out["data"] = std::move(data);
  return out;
}

Matrix matrix_from_sized(const json& doc, const std::string& what) {
  const Eigen::Index rows = doc.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = doc.at("cols").get<Eigen::Index>();
  const json& data = doc.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::invalid_argument(what + ": data length does not match dimensions");
  Matrix M(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = data[k++].get<double>();
  return M;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const json& doc) {
  Vector v(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) v[i] = doc[i].get<double>();
  return v;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  in >> doc;
  return doc;
}

void write_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string problem_fingerprint(const json& problem_doc) { return sha256_hex(problem_doc.dump()); }

json to_json(const AnalysisProblem& p) {
  json doc;
  doc["system"]["A"] = matrix_rows(p.system.A);
  doc["system"]["B"] = matrix_rows(p.system.B);
  doc["system"]["C"] = matrix_rows(p.system.C);
  doc["system"]["D"] = matrix_rows(p.system.D);
  doc["band"]["m"] = p.band.m;
  doc["band"]["L"] = p.band.L;
  doc["rho"] = p.rho;
  doc["alpha"] = p.alpha;
  doc["beta"] = p.beta;
  doc["sector"]["l"] = p.sector.l;
  doc["sector"]["enabled"] = p.sector.enabled;
  doc["multiplier"]["nu1"] = p.shape.nu1;
  doc["multiplier"]["nu2"] = p.shape.nu2;
  return doc;
}

AnalysisProblem problem_from_json(const json& doc) {
  AnalysisProblem p;
  const json& sys = doc.at("system");
  Matrix A = matrix_from_rows(sys.at("A"), "system.A");
  Matrix B = matrix_from_rows(sys.at("B"), "system.B");
  Matrix C = matrix_from_rows(sys.at("C"), "system.C");
  if (sys.contains("D"))
    p.system = LtiSystem::make(std::move(A), std::move(B), std::move(C),
                               matrix_from_rows(sys.at("D"), "system.D"));
  else
    p.system = LtiSystem::make(std::move(A), std::move(B), std::move(C));
  p.band = SlopeBand::make(doc.at("band").at("m").get<double>(),
                           doc.at("band").at("L").get<double>());
  p.rho = doc.value("rho", 1.0);
  p.alpha = doc.value("alpha", 0.0);
  p.beta = doc.value("beta", 0.0);
  if (doc.contains("sector")) {
    p.sector.l = doc["sector"].value("l", 0.0);
    p.sector.enabled = doc["sector"].value("enabled", false);
  }
  if (doc.contains("multiplier")) {
    p.shape.nu1 = doc["multiplier"].value("nu1", 0);
    p.shape.nu2 = doc["multiplier"].value("nu2", 0);
  }
  p.validate();
  return p;
}

AnalysisProblem load_problem(const std::string& path, std::string* fingerprint) {
  const json doc = read_file(path);
  if (fingerprint) *fingerprint = problem_fingerprint(doc);
  return problem_from_json(doc);
}

void save_problem(const AnalysisProblem& problem, const std::string& path) {
  write_file(to_json(problem), path);
}

json to_json(const Certificate& cert) {
  json doc;
  doc["calX"] = matrix_sized(cert.calX);
  doc["lambda"] = vector_json(cert.lambda);
  doc["E"] = matrix_sized(cert.E);
  doc["mu"] = cert.mu;
  doc["H"] = vector_json(cert.H);
  doc["gamma"] = cert.gamma;
  doc["rho"] = cert.rho;
  doc["alpha"] = cert.alpha;
  doc["beta"] = cert.beta;
  doc["band"]["m"] = cert.band.m;
  doc["band"]["L"] = cert.band.L;
  doc["shape"]["nu1"] = cert.shape.nu1;
  doc["shape"]["nu2"] = cert.shape.nu2;
  doc["sector"]["l"] = cert.sector_l;
  doc["sector"]["enabled"] = cert.sector_enabled;
  doc["multiplier_enabled"] = cert.multiplier_enabled;
  doc["n"] = cert.n;
  doc["d"] = cert.d;
  doc["eps"] = cert.eps;
  doc["problem_sha"] = cert.problem_sha;
  doc["solver"]["name"] = cert.solver_name;
  doc["solver"]["status"] = cert.solver_status;
  json margins = json::array();
  for (const ConstraintMargin& m : cert.margins)
    margins.push_back(json{{"name", m.name}, {"value", m.value}});
  doc["solver"]["margins"] = std::move(margins);
  return doc;
}

Certificate certificate_from_json(const json& doc) {
  Certificate cert;
  cert.calX = matrix_from_sized(doc.at("calX"), "calX");
  cert.lambda = vector_from_json(doc.at("lambda"));
  cert.E = matrix_from_sized(doc.at("E"), "E");
  cert.mu = doc.at("mu").get<double>();
  cert.H = vector_from_json(doc.at("H"));
  cert.gamma = doc.at("gamma").get<double>();
  cert.rho = doc.at("rho").get<double>();
  cert.alpha = doc.at("alpha").get<double>();
  cert.beta = doc.at("beta").get<double>();
  cert.band = SlopeBand::make(doc.at("band").at("m").get<double>(),
                              doc.at("band").at("L").get<double>());
  cert.shape.nu1 = doc.at("shape").at("nu1").get<int>();
  cert.shape.nu2 = doc.at("shape").at("nu2").get<int>();
  cert.sector_l = doc.at("sector").at("l").get<double>();
  cert.sector_enabled = doc.at("sector").at("enabled").get<bool>();
  cert.multiplier_enabled = doc.at("multiplier_enabled").get<bool>();
  cert.n = doc.at("n").get<int>();
  cert.d = doc.at("d").get<int>();
  cert.eps = doc.at("eps").get<double>();
  cert.problem_sha = doc.at("problem_sha").get<std::string>();
  cert.solver_name = doc.at("solver").at("name").get<std::string>();
  cert.solver_status = doc.at("solver").at("status").get<std::string>();
  for (const json& m : doc.at("solver").at("margins"))
    cert.margins.push_back({m.at("name").get<std::string>(), m.at("value").get<double>()});
  return cert;
}

Certificate load_certificate(const std::string& path) {
  return certificate_from_json(read_file(path));
}

void save_certificate(const Certificate& cert, const std::string& path) {
  write_file(to_json(cert), path);
}

json to_json(const SlopeRestrictedFunction& f) {
  json doc;
  doc["kind"] = f.kind;
  doc["seed"] = f.seed;
  doc["band"]["m"] = f.band.m;
  doc["band"]["L"] = f.band.L;
  doc["dim"] = f.dim;
  json profiles = json::array();
  for (const Profile& p : f.profiles) {
    json pj;
    if (p.type() == Profile::Type::Tanh) {
      pj["type"] = "tanh";
    } else {
      pj["type"] = "pwl";
      pj["breakpoints"] = p.breakpoints();
      pj["slopes"] = p.slopes();
    }
    profiles.push_back(std::move(pj));
  }
  doc["profiles"] = std::move(profiles);
  doc["mixing"] = matrix_sized(f.mixing.size() ? f.mixing : Matrix(0, 0));
  return doc;
}

SlopeRestrictedFunction function_from_json(const json& doc) {
  SlopeRestrictedFunction f;
  f.kind = doc.value("kind", "custom");
  f.seed = doc.value("seed", std::uint64_t{0});
  f.band = SlopeBand::make(doc.at("band").at("m").get<double>(),
                           doc.at("band").at("L").get<double>());
  f.dim = doc.at("dim").get<int>();
  for (const json& pj : doc.at("profiles")) {
    if (pj.at("type") == "tanh")
      f.profiles.push_back(Profile::smooth_sigmoid());
    else
      f.profiles.push_back(
          Profile::piecewise_linear(pj.at("breakpoints").get<std::vector<double>>(),
                                    pj.at("slopes").get<std::vector<double>>()));
  }
  if (static_cast<int>(f.profiles.size()) != f.dim)
    throw std::invalid_argument("function fixture: profile count != dim");
  const Matrix Q = matrix_from_sized(doc.at("mixing"), "mixing");
  if (Q.size() > 0) f.mixing = Q;
  return f;
}

json to_json(const FirMultiplier& mult) {
  json doc;
  doc["nu1"] = mult.nu1;
  doc["nu2"] = mult.nu2;
  doc["lambda"] = vector_json(mult.lambda);
  doc["E"] = matrix_sized(mult.E);
  return doc;
}

json to_json(const CheckReport& report) {
  json doc;
  doc["name"] = report.name;
  doc["samples"] = report.samples;
  doc["worst"] = report.worst;
  doc["tol"] = report.tol;
  doc["pass"] = report.pass;
  doc["seed"] = report.seed;
  doc["detail"] = report.detail;
  return doc;
}

FirMultiplier multiplier_from_json(const json& doc) {
  return FirMultiplier::make(doc.at("nu1").get<int>(), doc.at("nu2").get<int>(),
                             vector_from_json(doc.at("lambda")),
                             matrix_from_sized(doc.at("E"), "E"));
}

namespace {

void append_number(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

}  // namespace

void write_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "L,variant,gamma,size,mu,feasible,seconds\n";
  for (const SweepCell& c : cells) {
    std::string line;
    append_number(line, c.L);
    line += ',';
    line += to_string(c.variant);
    line += ',';
    if (c.feasible)
      append_number(line, c.gamma);
    else
      line += "inf";
    line += ',';
    append_number(line, c.feasible ? c.size : 0.0);
    line += ',';
    if (c.feasible)
      append_number(line, c.mu);
    else
      line += "nan";
    line += ',';
    line += c.feasible ? '1' : '0';
    line += ',';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", c.seconds);
    line += buf;
    out << line << '\n';
  }
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const int n = traj.x.empty() ? 0 : static_cast<int>(traj.x[0].size());
  const int d = traj.z.empty() ? 0 : static_cast<int>(traj.z[0].size());
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= d; ++i) out << ",z" << i;
  for (int i = 1; i <= d; ++i) out << ",w" << i;
  out << '\n';
  for (int t = 0; t < traj.horizon; ++t) {
    std::string line = std::to_string(t);
    for (int i = 0; i < n; ++i) {
      line += ',';
      append_number(line, traj.x[t][i]);
    }
    for (int i = 0; i < d; ++i) {
      line += ',';
      append_number(line, traj.z[t][i]);
    }
    for (int i = 0; i < d; ++i) {
      line += ',';
      append_number(line, traj.w[t][i]);
    }
    out << line << '\n';
  }
}

}  // namespace ozf::io
