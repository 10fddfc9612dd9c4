#include "l2plus/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace l2plus {

namespace {

using nlohmann::json;

Matrix to_matrix(const json& j, const char* what) {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::ParseError, std::string(what) + ": " + msg);
  };
  if (!j.is_array()) fail("expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  for (const auto& row : j) {
    if (!row.is_array()) fail("expected an array of rows");
    if (cols < 0) cols = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != cols) fail("ragged rows");
  }
  Matrix M(rows, std::max<Eigen::Index>(cols, 0));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      const json& v = j[r][c];
      if (!v.is_number()) fail("entries must be numbers");
      M(r, c) = v.get<double>();
    }
  }
  return M;
}

json from_matrix(const Matrix& M) {
  json j = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    j.push_back(std::move(row));
  }
  return j;
}

}  // namespace

StateSpace parse_system(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "expected an object");
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) {
      throw Error(ErrorKind::ParseError, std::string("missing key ") + key);
    }
  }
  StateSpace sys;
  sys.A = to_matrix(j["A"], "A");
  sys.B = to_matrix(j["B"], "B");
  sys.C = to_matrix(j["C"], "C");
  sys.D = to_matrix(j["D"], "D");
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw Error(ErrorKind::ParseError, "name must be a string");
    sys.name = j["name"].get<std::string>();
  }
  // Empty arrays carry no column count; recover the outer dimensions.
  const Eigen::Index n = sys.A.rows();
  if (sys.D.size() == 0 && n > 0) sys.D = Matrix::Zero(sys.C.rows(), sys.B.cols());
  if (sys.A.size() == 0) sys.A.resize(0, 0);
  if (sys.B.size() == 0) sys.B.resize(n, sys.D.cols());
  if (sys.C.size() == 0) sys.C.resize(sys.D.rows(), n);
  try {
    validate(sys);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DimensionMismatch) {
      throw Error(ErrorKind::ParseError, e.what());
    }
    throw;
  }
  return sys;
}

StateSpace read_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

std::string system_to_json(const StateSpace& sys) {
  json j;
  if (!sys.name.empty()) j["name"] = sys.name;
  j["A"] = from_matrix(sys.A);
  j["B"] = from_matrix(sys.B);
  j["C"] = from_matrix(sys.C);
  j["D"] = from_matrix(sys.D);
  return j.dump(2);
}

Matrix parse_matrix(const std::string& text) {
  try {
    return to_matrix(json::parse(text), "matrix");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace l2plus
