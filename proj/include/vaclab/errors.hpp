#pragma once

#include <stdexcept>
#include <string>

namespace vaclab {

enum class ErrorCode {
    quadrature_degree_insufficient,
    insufficient_smoothness,
    nonpositive_weight_at_node,
    not_in_h10,
    vacuum_condition_violated,
    eta_range_violation,
    dirichlet_violation,
    linear_solve_failure,
    no_convergence,
    gamma_out_of_range,
    flow_collapse,
    quadrature_nonconvergence,
    missing_derivative_stack,
    stack_depth_insufficient,
    config_invalid,
    precondition,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, ErrorCode code, const std::string& msg) {
    if (!ok) fail(code, msg);
}

}  // namespace vaclab
