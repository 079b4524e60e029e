#include "vpshell/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vpshell {

std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

void write_ensemble_csv(const std::string &path, const Ensemble &e,
                        const std::string &comment)
{
    std::ostringstream out;
    if (!comment.empty())
        out << "# " << comment << "\n";
    out << "index,R,W,L,weight\n";
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto &p = e.particles[i];
        out << i << ',' << format_double(p.R) << ',' << format_double(p.W) << ','
            << format_double(p.L) << ',' << format_double(p.weight) << "\n";
    }
    write_text_file(path, out.str());
}

Ensemble read_ensemble_csv(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open: " + path);
    Ensemble e;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            if (line != "index,R,W,L,weight")
                throw FormatError("bad ensemble CSV header in " + path);
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        double vals[5];
        for (int k = 0; k < 5; ++k) {
            if (!std::getline(ss, tok, ','))
                throw FormatError("short row in " + path + ": " + line);
            try {
                std::size_t pos = 0;
                vals[k] = std::stod(tok, &pos);
                if (pos != tok.size())
                    throw FormatError("bad number in " + path + ": " + tok);
            } catch (const FormatError &) {
                throw;
            } catch (...) {
                throw FormatError("bad number in " + path + ": " + tok);
            }
        }
        if (std::getline(ss, tok, ','))
            throw FormatError("extra fields in " + path + ": " + line);
        if (static_cast<std::size_t>(vals[0]) != e.size())
            throw FormatError("non-sequential index in " + path + ": " + line);
        Particle p{vals[1], vals[2], vals[3], vals[4]};
        if (p.R <= 0.0 || p.L < 0.0 || p.weight <= 0.0)
            throw FormatError("invalid particle state in " + path + ": " + line);
        e.particles.push_back(p);
    }
    if (!header_seen || e.particles.empty())
        throw FormatError("no particle rows in " + path);
    e.total_mass = sum_weights(e);
    return e;
}

void write_series_csv(const std::string &path, const TimeSeries &series,
                      const std::string &comment)
{
    std::ostringstream out;
    if (!comment.empty())
        out << "# " << comment << "\n";
    out << "t,sup_rho,sup_field,r_min,r_max,kinetic,field_energy,total_energy\n";
    for (const auto &r : series.rows) {
        out << format_double(r.t) << ',' << format_double(r.sup_rho) << ','
            << format_double(r.sup_field) << ',' << format_double(r.r_min) << ','
            << format_double(r.r_max) << ',' << format_double(r.kinetic) << ','
            << format_double(r.field_energy) << ',' << format_double(r.total_energy)
            << "\n";
    }
    write_text_file(path, out.str());
}

} // namespace vpshell
