#include "qig/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qig::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    bad(std::string(what) + ": " + e.what());
  }
}

RealMatrix real_block(const Json& rows, Eigen::Index dim, const char* field) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim) {
    bad(std::string("matrix field '") + field + "' must have dim rows");
  }
  RealMatrix out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      bad(std::string("matrix field '") + field + "' must have dim columns");
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
      const Json& x = row[static_cast<std::size_t>(k)];
      if (!x.is_number()) bad(std::string("matrix field '") + field + "' holds a non-number");
      out(i, k) = x.get<double>();
    }
  }
  return out;
}

std::vector<Matrix> hermitian_list(const Json& j, const char* plural, const char* singular) {
  std::vector<Matrix> out;
  if (j.contains(plural)) {
    if (!j.at(plural).is_array()) bad(std::string("family field '") + plural + "' must be an array");
    for (const auto& m : j.at(plural)) out.push_back(parse_hermitian(m));
  } else if (j.contains(singular)) {
    out.push_back(parse_hermitian(j.at(singular)));
  } else {
    bad(std::string("family needs '") + singular + "' or '" + plural + "'");
  }
  return out;
}

void dump_number(std::ostringstream& os, double x) {
  if (std::isnan(x)) {
    os << "null";
  } else if (std::isinf(x)) {
    os << (x > 0 ? "\"inf\"" : "\"-inf\"");
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
  }
}

void dump_value(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const bool flat_array = j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& x) {
                            return x.is_primitive();
                          });
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        dump_value(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      if (flat_array) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << (indent > 0 ? ", " : ",");
          dump_value(os, j[i], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[" << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << "," << nl;
        os << pad;
        dump_value(os, j[i], indent, depth + 1);
      }
      os << nl << close_pad << "]";
      return;
    }
    case Json::value_t::number_float:
      dump_number(os, j.get<double>());
      return;
    default:
      os << j.dump();
      return;
  }
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    bad("'" + path + "' is not valid JSON: " + e.what());
  }
}

ProbDist parse_probdist(const Json& j) {
  return guarded("probability vector", [&] {
    if (!j.is_array() || j.empty()) bad("probability vector must be a non-empty JSON array");
    Vector w(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) bad("probability vector holds a non-number");
      w(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return ProbDist::normalised(std::move(w), 1e-9);
  });
}

Matrix parse_matrix(const Json& j) {
  return guarded("matrix", [&] {
    if (!j.is_object()) bad("matrix must be a JSON object with dim, re, im");
    const Json& dim_field = j.at("dim");
    if (!dim_field.is_number_integer() || dim_field.get<long long>() < 1) bad("matrix 'dim' must be a positive integer");
    const Eigen::Index dim = dim_field.get<Eigen::Index>();
    const RealMatrix re = real_block(j.at("re"), dim, "re");
    const RealMatrix im = j.contains("im") ? real_block(j.at("im"), dim, "im") : RealMatrix::Zero(dim, dim);
    Matrix m(dim, dim);
    m.real() = re;
    m.imag() = im;
    return m;
  });
}

Matrix parse_hermitian(const Json& j) {
  const Matrix m = parse_matrix(j);
  if (!is_hermitian(m)) throw Error(ErrorCode::NonHermitianInput, "matrix is not Hermitian");
  return hermitian_part(m);
}

DensityMatrix parse_density(const Json& j) { return DensityMatrix::normalised(parse_matrix(j), 1e-9); }

Povm parse_povm(const Json& j) {
  return guarded("povm", [&] {
    if (!j.is_array() || j.empty()) bad("POVM must be a non-empty JSON array of matrices");
    std::vector<Matrix> elements;
    for (const auto& e : j) elements.push_back(parse_matrix(e));
    return Povm(std::move(elements));
  });
}

Json to_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    Json c = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      r.push_back(m(i, k).real());
      c.push_back(m(i, k).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return Json{{"dim", m.rows()}, {"re", re}, {"im", im}};
}

Json to_json(const RealMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

FamilySpec parse_family(const Json& j) {
  return guarded("family", [&] {
    if (!j.is_object()) bad("family must be a JSON object");
    const std::string kind = j.at("kind").get<std::string>();
    FamilySpec spec;
    if (kind == "unitary") {
      spec.family = unitary_family(parse_density(j.at("rho0")), hermitian_list(j, "hamiltonians", "hamiltonian"));
    } else if (kind == "linear") {
      spec.family = linear_family(parse_density(j.at("rho0")), hermitian_list(j, "directions", "direction"));
    } else if (kind == "thermal") {
      spec.family = thermal_family(parse_hermitian(j.at("hamiltonian")));
    } else if (kind == "lindblad") {
      std::vector<Matrix> jumps;
      if (j.contains("jumps")) {
        for (const auto& m : j.at("jumps")) jumps.push_back(parse_matrix(m));
      }
      spec.family = lindblad_family(parse_density(j.at("rho0")), parse_hermitian(j.at("hamiltonian")),
                                    std::move(jumps));
    } else {
      bad("unknown family kind '" + kind + "'");
    }
    if (j.contains("theta0")) spec.theta0 = j.at("theta0").get<double>();
    if (j.contains("tau")) spec.tau = j.at("tau").get<double>();
    return spec;
  });
}

std::string dump(const Json& j, int indent) {
  std::ostringstream os;
  dump_value(os, j, indent, 0);
  return os.str();
}

bool contains_infinity(const Json& j) {
  if (j.is_number_float()) return std::isinf(j.get<double>());
  if (j.is_structured()) {
    for (const auto& x : j) {
      if (contains_infinity(x)) return true;
    }
  }
  return false;
}

}  // namespace qig::io
