#ifndef VPSHELL_IO_HPP
#define VPSHELL_IO_HPP

#include <stdexcept>
#include <string>

#include "vpshell/core.hpp"
#include "vpshell/diagnostics.hpp"

namespace vpshell {

// Malformed input file; the CLI maps this to exit code 65.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip-exact decimal form.
std::string format_double(double v);

// CSV `index,R,W,L,weight`. A leading `# ...` comment line carries the tool
// version and resolved configuration; readers skip comment lines.
void write_ensemble_csv(const std::string &path, const Ensemble &e,
                        const std::string &comment);
Ensemble read_ensemble_csv(const std::string &path);

// CSV `t,sup_rho,sup_field,r_min,r_max,kinetic,field_energy,total_energy`.
void write_series_csv(const std::string &path, const TimeSeries &series,
                      const std::string &comment);

void write_text_file(const std::string &path, const std::string &content);

} // namespace vpshell

#endif
