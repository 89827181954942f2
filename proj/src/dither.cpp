#include "esctk/dither.hpp"

#include <cmath>

#include "esctk/errors.hpp"

namespace esctk {

int DitherSchedule::channels() const {
    switch (kind) {
        case DitherKind::Sinusoid:
        case DitherKind::DecayingSinusoid:
            return static_cast<int>(omegas.size());
        case DitherKind::None:
        case DitherKind::ExpDecay:
            return dim;
    }
    return dim;
}

void DitherSchedule::validate() const {
    const bool sinusoidal =
        kind == DitherKind::Sinusoid || kind == DitherKind::DecayingSinusoid;
    if (sinusoidal && omegas.empty())
        throw ConfigError("dither.omega", "at least one frequency required");
    for (double w : omegas)
        if (!(w > 0.0)) throw ConfigError("dither.omega", "frequencies must be positive");
    if (kind == DitherKind::DecayingSinusoid || kind == DitherKind::ExpDecay)
        if (!(tau > 0.0)) throw ConfigError("dither.tau", "decay constant must be positive");
    if (!sinusoidal && dim < 1)
        throw ConfigError("dither.dim", "channel count must be positive");
}

Eigen::VectorXd DitherSchedule::at(double t) const {
    const int m = channels();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
    switch (kind) {
        case DitherKind::None:
            break;
        case DitherKind::Sinusoid:
            for (int i = 0; i < m; ++i) d[i] = amplitude * std::sin(omegas[i] * t);
            break;
        case DitherKind::DecayingSinusoid: {
            const double envelope = amplitude * std::exp(-t / tau);
            for (int i = 0; i < m; ++i) d[i] = envelope * std::sin(omegas[i] * t);
            break;
        }
        case DitherKind::ExpDecay:
            d.setConstant(amplitude * std::exp(-t / tau));
            break;
    }
    return d;
}

}  // namespace esctk
