#pragma once

#include <string>
#include <vector>

#include "locspec/partition.hpp"
#include "locspec/potential.hpp"

namespace locspec {

struct NamedPotential {
    std::string name;
    HermitianPotential potential;
};

/// zero, constant q = 3, periodic delta comb (-5 at the integers), q = x^2, diag(q = 3, q = x^2),
/// and that direct sum conjugated by a fixed complex unitary.
std::vector<NamedPotential> identity_battery();

/// Three smooth bumps of the given dimension with different supports, phases and amplitudes.
std::vector<TestFunction> identity_test_functions(int dimension);

struct IdentityRow {
    std::string potential;
    int test_function = 0;
    IdentityCheck localization;
    IdentityCheck parseval;
};

std::vector<IdentityRow> run_identity_battery(const std::vector<NamedPotential>& battery, double ell,
                                              IdentityQuadrature quad = {});

/// q = 0, q = x^2, q = -x^2 and the period-1 comb of strength -5 at the integers.
std::vector<NamedPotential> localization_battery();

}  // namespace locspec
