#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qtt/chebyshev.hpp"
#include "qtt/mps.hpp"
#include "qtt/tci.hpp"

namespace qtt {

// Binary state file with a bit-exact round trip. Little-endian layout,
// documented in docs/mps-format.md. Loading validates the chain wiring and
// rejects files with a foreign magic, version, or scalar kind.
void save_mps(const MPS& m, std::ostream& out);
void save_mps(const MPS& m, const std::string& path);
MPS load_mps(std::istream& in);
MPS load_mps(const std::string& path);

nlohmann::json to_json(const ChebyshevExpansion& e);
ChebyshevExpansion expansion_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CrossDiagnostics& d);

}  // namespace qtt
