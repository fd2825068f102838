#include "vcadslicer/errors.hpp"

namespace vcad {

const char* errc_name(errc kind) {
    switch (kind) {
    case errc::syntax: return "SyntaxError";
    case errc::arity: return "ArityError";
    case errc::unknown_identifier: return "UnknownIdentifier";
    case errc::mesh_not_loaded: return "MeshNotLoaded";
    case errc::eval: return "EvalError";
    case errc::resolution: return "ResolutionError";
    case errc::numerical_degeneracy: return "NumericalDegeneracy";
    case errc::uncovered_segment: return "UncoveredSegment";
    case errc::invalid_count: return "InvalidCount";
    case errc::unsupported: return "Unsupported";
    case errc::band_overlap: return "BandOverlap";
    case errc::invalid_bead: return "InvalidBead";
    case errc::out_of_range: return "OutOfRange";
    case errc::bed_bounds: return "BedBounds";
    case errc::bed_overflow: return "BedOverflow";
    case errc::state_missing: return "StateMissing";
    case errc::no_transition: return "NoTransition";
    case errc::non_convergence: return "NonConvergence";
    case errc::parse: return "ParseError";
    case errc::config: return "ConfigError";
    case errc::io: return "IoError";
    }
    return "Error";
}

} // namespace vcad
