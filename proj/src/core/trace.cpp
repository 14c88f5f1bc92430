#include "core/trace.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace plcauto {

std::vector<Observation> dedup_consecutive(std::span<const Observation> trace) {
    std::vector<Observation> out;
    out.reserve(trace.size());
    for (const auto& obs : trace) {
        if (out.empty() || out.back().sensors != obs.sensors) out.push_back(obs);
    }
    return out;
}

std::vector<Observation> to_observations(std::span<const Sample> samples,
                                         std::size_t first_index) {
    std::vector<Observation> out;
    out.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        out.push_back(Observation{first_index + i, samples[i].sensors});
    return out;
}

std::vector<Observation> to_observations(const LabeledTrace& trace) {
    return to_observations(trace.samples, 0);
}

namespace {

std::vector<std::size_t> a_run_onsets(const LabeledTrace& trace) {
    std::vector<std::size_t> onsets;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& label = trace.samples[i].label;
        if (!label)
            throw Error(ErrorKind::data,
                        "cannot segment an unlabeled trace (sample " + std::to_string(i) +
                            " has no label)");
        const bool is_a = *label == PositionLabel::A;
        const bool prev_a =
            i > 0 && trace.samples[i - 1].label == PositionLabel::A;
        if (is_a && !prev_a) onsets.push_back(i);
    }
    return onsets;
}

}  // namespace

std::vector<Cycle> segment_cycles(const LabeledTrace& trace) {
    const auto onsets = a_run_onsets(trace);
    std::vector<Cycle> cycles;
    if (onsets.size() < 2) return cycles;
    cycles.reserve(onsets.size() - 1);
    for (std::size_t j = 0; j + 1 < onsets.size(); ++j) {
        Cycle c;
        c.start_index = onsets[j];
        c.end_index = onsets[j + 1];
        c.samples.assign(trace.samples.begin() + static_cast<std::ptrdiff_t>(c.start_index),
                         trace.samples.begin() + static_cast<std::ptrdiff_t>(c.end_index));
        cycles.push_back(std::move(c));
    }
    return cycles;
}

std::pair<std::vector<Cycle>, std::vector<Cycle>> split_train_test(
    std::span<const Cycle> cycles, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorKind::usage, "train fraction must lie strictly between 0 and 1");
    const std::size_t n = cycles.size();
    if (n < 2)
        throw Error(ErrorKind::data,
                    "need at least 2 cycles to split, got " + std::to_string(n));
    const auto n_train =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw Error(ErrorKind::data,
                    "split would leave an empty train or test set (" + std::to_string(n) +
                        " cycles, fraction " + std::to_string(train_fraction) + ")");
    std::vector<Cycle> train(cycles.begin(), cycles.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<Cycle> test(cycles.begin() + static_cast<std::ptrdiff_t>(n_train), cycles.end());
    return {std::move(train), std::move(test)};
}

namespace {

constexpr const char* kHeaderPrefix = "# sampling_period_ms=";

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw Error(ErrorKind::data, "line " + std::to_string(line_no) + ": " + what);
}

Sample parse_row(const std::string& row, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(row);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!row.empty() && row.back() == ',') fields.push_back("");
    if (fields.size() != kSensorCount + 1)
        parse_fail(line_no, "expected 11 sensor columns plus a label, got " +
                                std::to_string(fields.size()) + " columns");

    Sample s;
    for (int i = 0; i < kSensorCount; ++i) {
        const std::string& f = fields[static_cast<std::size_t>(i)];
        if (f == "0")
            s.sensors.set_bit(i, 0);
        else if (f == "1")
            s.sensors.set_bit(i, 1);
        else
            parse_fail(line_no, "sensor value '" + f + "' is not binary");
    }
    const std::string& tok = fields[kSensorCount];
    if (tok == "?") {
        s.label = std::nullopt;
    } else if (tok.size() == 1) {
        try {
            s.label = label_from_char(tok[0]);
        } catch (const Error&) {
            parse_fail(line_no, "unknown label '" + tok + "'");
        }
    } else {
        parse_fail(line_no, "unknown label '" + tok + "'");
    }
    return s;
}

}  // namespace

LabeledTrace parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    LabeledTrace trace;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("#", 0) == 0) {
            if (line.rfind(kHeaderPrefix, 0) == 0) {
                const std::string value = line.substr(std::string(kHeaderPrefix).size());
                try {
                    trace.sampling_period_ms = std::stoi(value);
                } catch (const std::exception&) {
                    parse_fail(line_no, "bad sampling period '" + value + "'");
                }
                if (trace.sampling_period_ms <= 0)
                    parse_fail(line_no, "sampling period must be positive");
                saw_header = true;
            }
            continue;  // other comment lines are ignored
        }
        trace.samples.push_back(parse_row(line, line_no));
    }
    if (!saw_header)
        throw Error(ErrorKind::data,
                    "missing trace header '# sampling_period_ms=<int>'");
    return trace;
}

std::string format_trace_csv(const LabeledTrace& trace) {
    std::string out = kHeaderPrefix + std::to_string(trace.sampling_period_ms) + "\n";
    for (const auto& s : trace.samples) {
        for (int i = 0; i < kSensorCount; ++i) {
            out += static_cast<char>('0' + s.sensors.bit(i));
            out += ',';
        }
        out += s.label ? label_to_char(*s.label) : '?';
        out += '\n';
    }
    return out;
}

LabeledTrace read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::data, "cannot open trace file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_trace_csv(buf.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

void write_trace_file(const LabeledTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::data, "cannot open '" + path + "' for writing");
    out << format_trace_csv(trace);
    if (!out) throw Error(ErrorKind::data, "failed writing trace file '" + path + "'");
}

}  // namespace plcauto
