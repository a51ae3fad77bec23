#include "io.hpp"

#include <string>

namespace bimodal::io {
namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::ParseError, what, "triple_from_json");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + " must be a number");
  return j.get<double>();
}

Eigen::MatrixXd read_matrix(const json& j, int n, const char* key) {
  if (!j.contains(key)) parse_error(std::string("missing \"") + key + "\"");
  const json& rows = j.at(key);
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(key) + " must have n rows",
                "triple_from_json");
  }
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, std::string(key) + " must have n columns",
                  "triple_from_json");
    }
    for (int k = 0; k < n; ++k) {
      M(i, k) = number(row[static_cast<std::size_t>(k)],
                       std::string(key) + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  return M;
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json triple_to_json(const Triple& x) {
  return {{"n", x.n()},
          {"A1", matrix_to_json(x.A1())},
          {"A2", matrix_to_json(x.A2())},
          {"B", vector_to_json(x.B())}};
}

json direction_to_json(const TripleDirection& v) {
  return {{"X1", matrix_to_json(v.X1)}, {"X2", matrix_to_json(v.X2)}, {"Y", vector_to_json(v.Y)}};
}

Triple triple_from_json(const json& j, double tol) {
  if (!j.is_object()) parse_error("triple must be a JSON object");
  if (j.contains("triple") && !j.contains("A1")) return triple_from_json(j.at("triple"), tol);
  if (!j.contains("A1")) parse_error("missing \"A1\"");
  const json& a1 = j.at("A1");
  if (!a1.is_array() || a1.empty()) parse_error("\"A1\" must be a non-empty array of rows");
  const int n = j.contains("n") ? static_cast<int>(number(j.at("n"), "n"))
                                : static_cast<int>(a1.size());
  if (n < 2) {
    throw Error(ErrorCode::DimensionMismatch, "n must be at least 2", "triple_from_json");
  }
  const Eigen::MatrixXd A1 = read_matrix(j, n, "A1");
  const Eigen::MatrixXd A2 = read_matrix(j, n, "A2");
  if (!j.contains("B")) parse_error("missing \"B\"");
  const json& b = j.at("B");
  if (!b.is_array() || static_cast<int>(b.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "B must have n entries", "triple_from_json");
  }
  Eigen::VectorXd B(n);
  for (int i = 0; i < n; ++i) {
    B(i) = number(b[static_cast<std::size_t>(i)], "B[" + std::to_string(i) + "]");
  }
  return validate_triple(n, A1, A2, B, tol).triple;
}

}  // namespace bimodal::io
