#ifndef PLCAUTO_TESTS_HELPERS_HPP
#define PLCAUTO_TESTS_HELPERS_HPP

#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace plcauto::test {

/// Sensor vector from the low 11 bits of a pattern.
inline SensorVector sv(unsigned pattern) {
    SensorVector v;
    for (int i = 0; i < kSensorCount; ++i)
        v.set_bit(i, static_cast<std::uint8_t>((pattern >> i) & 1u));
    return v;
}

inline SensorVector random_vector(Rng& rng) {
    return sv(static_cast<unsigned>(rng.raw() & 0x7ffu));
}

inline PositionLabel random_label(Rng& rng) {
    return static_cast<PositionLabel>(rng.uniform_int(0, kClassCount - 1));
}

/// Observations drawn from a small pool so consecutive duplicates happen.
inline std::vector<Observation> random_observations(Rng& rng, std::size_t max_len,
                                                    int pool = 4) {
    const int len = rng.uniform_int(0, static_cast<int>(max_len));
    std::vector<Observation> out;
    for (int i = 0; i < len; ++i)
        out.push_back(
            {static_cast<std::size_t>(i), sv(static_cast<unsigned>(rng.uniform_int(0, pool - 1)))});
    return out;
}

inline LabeledTrace trace_from_labels(const std::string& labels) {
    LabeledTrace t;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Sample s;
        s.sensors = sv(static_cast<unsigned>(i * 37 + 1));
        s.label = label_from_char(labels[i]);
        t.samples.push_back(s);
    }
    return t;
}

}  // namespace plcauto::test

#endif
