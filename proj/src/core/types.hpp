#ifndef PLCAUTO_CORE_TYPES_HPP
#define PLCAUTO_CORE_TYPES_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcauto {

inline constexpr int kSensorCount = 11;
inline constexpr int kClassCount = 5;
inline constexpr int kDefaultSamplingPeriodMs = 500;

/// Error categories; values double as CLI exit codes.
enum class ErrorKind : int {
    usage = 1,    // bad arguments or configuration
    data = 2,     // parse/validation failures
    numeric = 3,  // non-finite values during training (NaN guard)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// One sampled reading of the 11 binary proximity sensors.
class SensorVector {
public:
    SensorVector() : bits_{} {}

    static SensorVector from_bits(const std::array<std::uint8_t, kSensorCount>& bits) {
        SensorVector v;
        v.bits_ = bits;
        for (auto b : v.bits_) {
            if (b > 1) throw Error(ErrorKind::data, "sensor bit must be 0 or 1");
        }
        return v;
    }

    /// Parses a string of exactly 11 '0'/'1' characters, sensor 0 first.
    static SensorVector from_string(const std::string& s) {
        if (s.size() != kSensorCount)
            throw Error(ErrorKind::data,
                        "sensor bitstring must have exactly 11 characters, got " +
                            std::to_string(s.size()));
        SensorVector v;
        for (int i = 0; i < kSensorCount; ++i) {
            if (s[i] != '0' && s[i] != '1')
                throw Error(ErrorKind::data, "sensor bitstring may contain only 0 and 1");
            v.bits_[i] = static_cast<std::uint8_t>(s[i] - '0');
        }
        return v;
    }

    std::uint8_t bit(int i) const { return bits_.at(static_cast<std::size_t>(i)); }

    void set_bit(int i, std::uint8_t value) {
        if (value > 1) throw Error(ErrorKind::data, "sensor bit must be 0 or 1");
        bits_.at(static_cast<std::size_t>(i)) = value;
    }

    void flip_bit(int i) { bits_.at(static_cast<std::size_t>(i)) ^= 1; }

    std::string to_string() const {
        std::string s(kSensorCount, '0');
        for (int i = 0; i < kSensorCount; ++i) s[static_cast<std::size_t>(i)] += bits_[static_cast<std::size_t>(i)];
        return s;
    }

    const std::array<std::uint8_t, kSensorCount>& bits() const { return bits_; }

    friend bool operator==(const SensorVector&, const SensorVector&) = default;
    friend auto operator<=>(const SensorVector&, const SensorVector&) = default;

private:
    std::array<std::uint8_t, kSensorCount> bits_;
};

/// The five classes, in fixed index order (argmax tie-break uses this order).
enum class PositionLabel : std::uint8_t { A = 0, B = 1, C = 2, D = 3, Transition = 4 };

inline char label_to_char(PositionLabel l) {
    switch (l) {
        case PositionLabel::A: return 'A';
        case PositionLabel::B: return 'B';
        case PositionLabel::C: return 'C';
        case PositionLabel::D: return 'D';
        case PositionLabel::Transition: return 'T';
    }
    throw Error(ErrorKind::data, "invalid position label value");
}

inline PositionLabel label_from_char(char c) {
    switch (c) {
        case 'A': return PositionLabel::A;
        case 'B': return PositionLabel::B;
        case 'C': return PositionLabel::C;
        case 'D': return PositionLabel::D;
        case 'T': return PositionLabel::Transition;
    }
    throw Error(ErrorKind::data, std::string("unknown label '") + c + "'");
}

inline bool is_position(PositionLabel l) { return l != PositionLabel::Transition; }

/// One timestep of a trace. `label` is absent in unlabeled traces.
struct Sample {
    SensorVector sensors;
    std::optional<PositionLabel> label;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// A sensor reading with its original timestep index (indices stay strictly
/// increasing through deduplication).
struct Observation {
    std::size_t index = 0;
    SensorVector sensors;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Time-ordered samples at a fixed sampling period.
struct LabeledTrace {
    std::vector<Sample> samples;
    int sampling_period_ms = kDefaultSamplingPeriodMs;

    bool fully_labeled() const {
        for (const auto& s : samples)
            if (!s.label) return false;
        return true;
    }

    friend bool operator==(const LabeledTrace&, const LabeledTrace&) = default;
};

/// A half-open slice [start_index, end_index) of a trace, anchored at an
/// onset of label A.
struct Cycle {
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    std::vector<Sample> samples;
};

}  // namespace plcauto

#endif
