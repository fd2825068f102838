#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vcad {

enum class errc {
    syntax,
    arity,
    unknown_identifier,
    mesh_not_loaded,
    eval,
    resolution,
    numerical_degeneracy,
    uncovered_segment,
    invalid_count,
    unsupported,
    band_overlap,
    invalid_bead,
    out_of_range,
    bed_bounds,
    bed_overflow,
    state_missing,
    no_transition,
    non_convergence,
    parse,
    config,
    io,
};

class Error : public std::runtime_error {
public:
    Error(errc kind, std::string message)
        : std::runtime_error(std::move(message)), m_kind(kind) {}
    errc kind() const { return m_kind; }

private:
    errc m_kind;
};

const char* errc_name(errc kind);

// Non-fatal diagnostics. Functions that can warn take an optional sink;
// a null sink silently drops warnings.
class WarningLog {
public:
    void add(std::string message) { m_messages.push_back(std::move(message)); }
    const std::vector<std::string>& messages() const { return m_messages; }
    bool empty() const { return m_messages.empty(); }
    size_t size() const { return m_messages.size(); }
    void merge(const WarningLog& other) {
        m_messages.insert(m_messages.end(), other.m_messages.begin(), other.m_messages.end());
    }

private:
    std::vector<std::string> m_messages;
};

inline void warn(WarningLog* log, std::string message) {
    if (log)
        log->add(std::move(message));
}

} // namespace vcad
