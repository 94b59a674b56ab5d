#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "qlab/geom.hpp"
#include "qlab/gf.hpp"
#include "qlab/ldt.hpp"
#include "qlab/mpoly.hpp"
#include "qlab/qpcp.hpp"
#include "qlab/qsim.hpp"
#include "qlab/retrieve.hpp"

namespace qlab {

using Json = nlohmann::ordered_json;

// Field parameters: {"a": ..., "modulus_bits": ...}; elements appear as
// unsigned integers everywhere.
Json field_to_json(const Field& f);
Field field_from_json(const Json& j);

Json lde_params_to_json(const LdeParams& p);
LdeParams lde_params_from_json(const Json& j);

// Flat integer array with an LdeParams header.
Json data_table_to_json(const LdeParams& p, const DataTable& t);
std::pair<LdeParams, DataTable> data_table_from_json(const Json& j);

Json point_to_json(const Point& p);
Point point_from_json(const Field& f, const Json& j);

Json line_to_json(const Line& l);
Line line_from_json(const Field& f, const Json& j);

Json subspace_to_json(const AffineSubspace& s);
AffineSubspace subspace_from_json(const Field& f, const Json& j);

Json unipoly_to_json(const UniPoly& p);
UniPoly unipoly_from_json(const Field& f, const Json& j);

// Lists of (exponent-vector, coefficient) pairs.
Json multipoly_to_json(const MultiPoly& p);
MultiPoly multipoly_from_json(const Field& f, const Json& j);

// Lists of (z-vector, y, re, im); the qlde_form flag marks sparse
// quantum-low-degree-extension states.
Json state_to_json(const QuantumState& s);
QuantumState state_from_json(const Json& j);

Json verdict_distribution_to_json(const VerdictDistribution& d);

Json acceptance_report_to_json(const AcceptanceReport& r);

Json gap_instance_to_json(const GapInstance& x);
GapInstance gap_instance_from_json(const Json& j);

Json proof_blocks_to_json(const ProofBlocks& blocks, const Field& f);
ProofBlocks proof_blocks_from_json(const Field& f, const Json& j);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

} // namespace qlab
