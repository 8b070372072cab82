#pragma once

// JSON file formats and the strict-JSON emitter used by the CLI.

#include <optional>
#include <string>

#include <json.hpp>

#include "qig/applications.hpp"
#include "qig/classical.hpp"
#include "qig/states.hpp"

namespace qig::io {

using Json = nlohmann::json;

Json read_json_file(const std::string& path);

// JSON array of non-negative reals, renormalised after a 1e-9 sum check.
ProbDist parse_probdist(const Json& j);
// {"dim": d, "re": [[...]], "im": [[...]]}, row-major; "im" may be omitted.
Matrix parse_matrix(const Json& j);
Matrix parse_hermitian(const Json& j);
DensityMatrix parse_density(const Json& j);
Povm parse_povm(const Json& j);

Json to_json(const Matrix& m);
Json to_json(const RealMatrix& m);
Json to_json(const Vector& v);

struct FamilySpec {
  StateFamily family;
  double theta0 = 0.0;
  std::optional<double> tau;
};

/// {"kind": "unitary" | "linear" | "thermal" | "lindblad", ...}
///   unitary:  "rho0", "hamiltonian" (or "hamiltonians")
///   linear:   "rho0", "direction" (or "directions")
///   thermal:  "hamiltonian"; the parameter is beta
///   lindblad: "rho0", "hamiltonian", "jumps"
/// plus optional "theta0" and "tau".
FamilySpec parse_family(const Json& j);

/// %.17g numbers, +inf / -inf as the strings "inf" / "-inf", NaN as null.
std::string dump(const Json& j, int indent = 2);

// True when any number in the document is infinite.
bool contains_infinity(const Json& j);

}  // namespace qig::io
