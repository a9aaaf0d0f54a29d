#pragma once

#include "htau/covering.hpp"
#include "htau/hyperelliptic.hpp"
#include "htau/isomonodromy.hpp"
#include "htau/tau.hpp"

#include "json.hpp"

namespace htau {

// complex values travel as [re, im], matrices as row-major lists of rows
nlohmann::json json_complex(cplx v);
nlohmann::json json_complex_list(const std::vector<cplx>& v);
nlohmann::json json_matrix(const CMat& M);
nlohmann::json json_sign_matrix(const CMat& M); // entries rounded to integers

cplx complex_from_json(const nlohmann::json& j);
std::vector<cplx> complex_list_from_json(const nlohmann::json& j);
CMat matrix_from_json(const nlohmann::json& j);

// {"num": [...], "den": [...]}, coefficients ascending
RationalCovering covering_from_json(const nlohmann::json& j);
// {"branch_points": [...]}
HyperellipticCurve curve_from_json(const nlohmann::json& j);

nlohmann::json branch_data_report(const std::vector<BranchDatum>& bd);
nlohmann::json period_report(const PeriodData& pd);
nlohmann::json theta_constants_report(const CMat& B, double eps);
nlohmann::json tau_report(const TauResult& t);
nlohmann::json monodromy_report(const MonodromyRep& rep);

} // namespace htau
