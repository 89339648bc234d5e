// Line-oriented text serialization: polynomial coefficient dumps and
// iteration-state snapshots are bit-exact at double precision (hexadecimal
// float rendering); report rows render as one JSON object per line.
#pragma once

#include <iosfwd>
#include <string>

#include "beamnf/driver.hpp"

namespace beamnf {

// One record per term: angle count, k-vector, gamma support pairs, kappa
// support pairs, re, im.  Bit-exact round-trip.
void write_poly(std::ostream& os, const PolyHamiltonian& h);
PolyHamiltonian read_poly(std::istream& is);

// Snapshot = header (v, schedule row, frequency vectors) + the low/high
// dumps + the generator chain.  read_state(write_state(s)) == s bitwise.
void write_state(std::ostream& os, const IterationState& st,
                 const ScheduleRow& row);
IterationState read_state(std::istream& is, ScheduleRow* row_out = nullptr);

std::string state_to_string(const IterationState& st, const ScheduleRow& row);
IterationState state_from_string(const std::string& text,
                                 ScheduleRow* row_out = nullptr);

// One report row as a single-line JSON object with a fixed key order.
std::string report_json(const StepReport& rep);

}  // namespace beamnf
