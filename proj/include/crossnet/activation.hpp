#pragma once

#include <string>

namespace crossnet {

enum class Activation { identity, relu, tanh, hard_tanh, sigmoid };

double activate(Activation f, double x);
/// Derivative as a function of the pre-activation. ReLU subgradient at 0 is 0.
double activate_grad(Activation f, double x);

std::string to_string(Activation f);
Activation activation_from_string(const std::string& s);

}  // namespace crossnet
