#include "crossnet/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace crossnet {

double activate(Activation f, double x) {
    switch (f) {
        case Activation::identity: return x;
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::tanh: return std::tanh(x);
        case Activation::hard_tanh: return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    }
    throw std::logic_error("unknown activation");
}

double activate_grad(Activation f, double x) {
    switch (f) {
        case Activation::identity: return 1.0;
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::hard_tanh: return (x > -1.0 && x < 1.0) ? 1.0 : 0.0;
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
    }
    throw std::logic_error("unknown activation");
}

std::string to_string(Activation f) {
    switch (f) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::hard_tanh: return "hard_tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "hard_tanh") return Activation::hard_tanh;
    if (s == "sigmoid") return Activation::sigmoid;
    throw std::invalid_argument("unknown activation: " + s);
}

}  // namespace crossnet
