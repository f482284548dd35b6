#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "trapfgr/banded.hpp"
#include "trapfgr/model.hpp"

namespace tfgr {

struct Soliton {
    Grid grid;
    double lambda = 0.0;
    double h = 0.0;
    PotentialSpec potential;  // depth 0 for the free problem
    RVec V;                   // sampled V(h x)
    RVec profile;             // phi
    RVec d_lambda;            // d phi / d lambda
    double residual_norm = 0.0;  // ||F(phi)|| / ||phi||
    double mass = 0.0;           // ||phi||^2
    double delta_prime = 0.0;    // <phi, phi_lambda>
    int newton_iterations = 0;
};

class NewtonFailure : public std::runtime_error {
public:
    NewtonFailure(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

// L_- = -d^2 + lambda + V - f(phi^2), L_+ = L_- - 2 f'(phi^2) phi^2
SymPenta build_Lminus(const Grid& g, double lambda, const RVec& V, const RVec& phi, const Nonlinearity& f);
SymPenta build_Lplus(const Grid& g, double lambda, const RVec& V, const RVec& phi, const Nonlinearity& f);

// closed-form free ground state for f(s) = s^p
RVec free_profile(const Grid& g, double lambda, double p = 1.0);

Soliton solve_free(double lambda, const Grid& g, const Nonlinearity& f);
Soliton solve_trapped(double lambda, const PotentialSpec& spec, const Grid& g, const Nonlinearity& f);

// Newton from a given seed on a fixed potential
Soliton solve_from_seed(double lambda, const PotentialSpec& spec, const Grid& g, const Nonlinearity& f,
                        const RVec& seed);

// solves L_+ phi_lambda = -phi and fills d_lambda, delta_prime
void lambda_derivative(Soliton& s, const Nonlinearity& f);

// equation residual -phi'' + (lambda + V) phi - f(phi^2) phi using the lattice stencil
RVec soliton_residual(const Soliton& s, const Nonlinearity& f);

}  // namespace tfgr
