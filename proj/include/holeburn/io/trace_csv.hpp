#pragma once

#include <iosfwd>
#include <string>

#include "holeburn/types.hpp"

namespace holeburn::io {

/// Column name of the abscissa for each trace kind; the suffix carries the
/// unit (t_s seconds, T_K kelvin, f_hz hertz, n_idx dimensionless index).
std::string abscissa_column(TraceKind kind);

/// Reads one trace from a CSV file:
///   # key = value            (metadata; kind is required, temperature_K
///   #                         and burn_* are picked up when present)
///   t_s,y[,sigma_y]          (header row; abscissa name must match kind)
///   0.0,1.25e-1[,1e-3]
/// Errors name the file and the 1-based line number.
DecayTrace read_trace(const std::string& path);
DecayTrace read_trace(std::istream& in, const std::string& label);

/// Writes a trace in the exact format read_trace accepts. Metadata keys are
/// emitted sorted; floats use %.12e so rewritten files are byte-stable.
void write_trace(const std::string& path, const DecayTrace& trace);
void write_trace(std::ostream& out, const DecayTrace& trace);

}  // namespace holeburn::io
