#pragma once

#include <string>

#include <json.hpp>

#include "tsnorm/certificates.hpp"
#include "tsnorm/classical_norm.hpp"
#include "tsnorm/grid_vector.hpp"
#include "tsnorm/modified_norm.hpp"
#include "tsnorm/params.hpp"
#include "tsnorm/sparse_vector.hpp"
#include "tsnorm/stabilization.hpp"

namespace tsnorm {

using json = nlohmann::json;

// params: {"p": 2.0, "r": 4}; serialization echoes every derived field.
json params_to_json(const Params& params);
Params params_from_json(const json& j);

// vectors: {"format":"sparse","entries":[[index,value],...]} or
//          {"format":"grid","base":"alpha"|"s"|"t","entries":[[index,sign,exponent],...]}
json sparse_to_json(const SparseVector& x);
json grid_to_json(const GridVector& x);

struct AnyVector {
    bool is_grid = false;
    SparseVector sparse;
    GridVector grid{GridBase::T};
};

AnyVector vector_from_json(const json& j);
SparseVector as_sparse(const AnyVector& v, const Params& params);
GridVector as_grid(const AnyVector& v, GridBase expected, const char* what);

// certificates: {"mode":..., "node": {"leaf":[sign,index]} | {"children":[...]}}
json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const json& j);

json split_tree_to_json(const SplitTree& node);
json level_assignment_to_json(const LevelAssignment& witness);

// Every inequality flag in the report is recomputed from the stored raw
// values here, not copied from the in-memory flags.
json stab_report_to_json(const StabReport& report);
std::string stab_report_to_csv(const StabReport& report);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

std::string format_g17(double v);

} // namespace tsnorm
