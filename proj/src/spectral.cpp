#include "encounterlens/spectral.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "encounterlens/csv.hpp"

namespace encounterlens {

namespace {

std::complex<double> unit_root(std::size_t m, std::size_t n) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

PowerSpectrum zero_spectrum(const AcfSeries& a, BinUnit sampling) {
    return PowerSpectrum{a.id, std::vector<double>(a.size(), 0.0), sampling, true};
}

}  // namespace

AcfSeries acf(std::span<const double> series, std::string id) {
    const std::size_t T = series.size();
    if (T < 2) throw ContractViolation("acf needs at least 2 samples");

    AcfSeries out;
    out.id = std::move(id);
    double sum = 0.0;
    for (double v : series) sum += v;
    out.mean = sum / static_cast<double>(T);

    std::vector<double> centered(T);
    double denom = 0.0;
    for (std::size_t d = 0; d < T; ++d) {
        centered[d] = series[d] - out.mean;
        denom += centered[d] * centered[d];
    }
    out.variance = denom / static_cast<double>(T);
    out.coefficients.assign(T, 0.0);
    out.coefficients[0] = 1.0;
    if (denom == 0.0) {
        out.degenerate = true;
        return out;
    }
    for (std::size_t k = 1; k < T; ++k) {
        double num = 0.0;
        for (std::size_t d = 0; d + k < T; ++d) num += centered[d] * centered[d + k];
        out.coefficients[k] = num / denom;
    }
    return out;
}

void fft_in_place(std::span<std::complex<double>> data) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw SchemaError("FFT length must be a power of 2, got " + std::to_string(n));

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    std::vector<std::complex<double>> twiddle;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        twiddle.resize(half);
        for (std::size_t j = 0; j < half; ++j) twiddle[j] = unit_root(j, len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const auto u = data[i + j];
                const auto v = data[i + j + half] * twiddle[j];
                data[i + j] = u + v;
                data[i + j + half] = u - v;
            }
        }
    }
}

PowerSpectrum power_spectrum(const AcfSeries& a, BinUnit sampling) {
    const std::size_t T = a.size();
    if (!is_power_of_two(T) || T < 2) {
        throw SchemaError("power spectrum needs a power-of-2 length, got T = " + std::to_string(T));
    }
    if (a.degenerate) return zero_spectrum(a, sampling);

    std::vector<std::complex<double>> buf(T);
    for (std::size_t k = 1; k < T; ++k) buf[k] = a.coefficients[k];
    fft_in_place(buf);

    PowerSpectrum out{a.id, std::vector<double>(T), sampling, false};
    for (std::size_t c = 0; c < T; ++c) out.magnitudes[c] = std::abs(buf[c]);
    return out;
}

PowerSpectrum naive_dft(const AcfSeries& a, BinUnit sampling) {
    const std::size_t T = a.size();
    if (a.degenerate) return zero_spectrum(a, sampling);

    PowerSpectrum out{a.id, std::vector<double>(T), sampling, false};
    for (std::size_t c = 0; c < T; ++c) {
        std::complex<double> y{};
        for (std::size_t k = 1; k < T; ++k) y += a.coefficients[k] * unit_root((k * c) % T, T);
        out.magnitudes[c] = std::abs(y);
    }
    return out;
}

PowerSpectrum normalize_spectrum(const PowerSpectrum& s) {
    PowerSpectrum out = s;
    if (out.magnitudes.empty()) {
        out.degenerate = true;
        return out;
    }
    out.magnitudes[0] = 0.0;
    double total = 0.0;
    for (std::size_t c = 1; c < out.size(); ++c) total += out.magnitudes[c];
    if (s.degenerate || total <= 0.0) {
        std::fill(out.magnitudes.begin(), out.magnitudes.end(), 0.0);
        out.degenerate = true;
        return out;
    }
    for (std::size_t c = 1; c < out.size(); ++c) out.magnitudes[c] /= total;
    return out;
}

GroupSpectrum group_average_spectrum(std::span<const PowerSpectrum> spectra, std::string label) {
    GroupSpectrum g;
    g.label = std::move(label);
    const PowerSpectrum* first = nullptr;
    for (const auto& s : spectra) {
        if (first == nullptr) {
            first = &s;
            g.sampling = s.sampling;
        } else if (s.size() != first->size() || s.sampling != first->sampling) {
            throw ContractViolation("group_average_spectrum: spectra differ in length or sampling rate");
        }
        if (s.degenerate) {
            ++g.n_excluded;
            continue;
        }
        if (g.mean_magnitudes.empty()) g.mean_magnitudes.assign(s.size(), 0.0);
        for (std::size_t c = 0; c < s.size(); ++c) g.mean_magnitudes[c] += s.magnitudes[c];
        ++g.n_pairs;
    }
    for (double& m : g.mean_magnitudes) m /= static_cast<double>(g.n_pairs);
    return g;
}

GroupAcf group_average_acf(std::span<const AcfSeries> series, std::string label) {
    GroupAcf g;
    g.label = std::move(label);
    for (const auto& a : series) {
        if (a.degenerate) continue;
        if (g.mean_coefficients.empty()) g.mean_coefficients.assign(a.size(), 0.0);
        if (a.size() != g.mean_coefficients.size()) {
            throw ContractViolation("group_average_acf: series differ in length");
        }
        for (std::size_t k = 0; k < a.size(); ++k) g.mean_coefficients[k] += a.coefficients[k];
        ++g.n_series;
    }
    for (double& r : g.mean_coefficients) r /= static_cast<double>(g.n_series);
    return g;
}

std::size_t argmax_component(std::span<const double> magnitudes, std::size_t lo, std::size_t hi) {
    if (lo > hi || hi >= magnitudes.size()) throw ContractViolation("argmax_component: bad component range");
    std::size_t best = lo;
    for (std::size_t c = lo + 1; c <= hi; ++c) {
        if (magnitudes[c] > magnitudes[best]) best = c;
    }
    return best;
}

void write_spectra_csv(std::ostream& out, std::span<const PowerSpectrum> raw,
                       std::span<const PowerSpectrum> normalized) {
    if (raw.size() != normalized.size()) throw ContractViolation("write_spectra_csv: misaligned inputs");
    out << "id,c,magnitude,normalized_magnitude\n";
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (std::size_t c = 0; c < raw[i].size(); ++c) {
            out << raw[i].id << ',' << c << ',' << csv::format_double(raw[i].magnitudes[c]) << ','
                << csv::format_double(normalized[i].magnitudes[c]) << '\n';
        }
    }
}

std::vector<PowerSpectrum> read_spectra_csv(std::istream& in, BinUnit sampling) {
    csv::LineReader reader(in);
    csv::expect_header(reader, "id,c,magnitude,normalized_magnitude", "spectrum CSV");
    std::vector<PowerSpectrum> out;
    while (auto line = reader.next()) {
        if (csv::trim(*line).empty()) continue;
        const auto fields = csv::split(*line);
        const auto bad = [&](const std::string& why) {
            return SchemaError("spectrum CSV line " + std::to_string(reader.line_number()) + ": " + why);
        };
        if (fields.size() != 4) throw bad("expected 4 fields");
        const auto c = csv::parse_int(fields[1]);
        const auto mag = csv::parse_double(fields[2]);
        if (!c || !mag) throw bad("non-numeric field");
        const std::string id(csv::trim(fields[0]));
        if (*c == 0) {
            out.push_back(PowerSpectrum{id, {}, sampling, false});
        } else if (out.empty() || out.back().id != id) {
            throw bad("component 0 must open each spectrum");
        }
        if (static_cast<std::size_t>(*c) != out.back().magnitudes.size()) throw bad("components out of order");
        out.back().magnitudes.push_back(*mag);
    }
    for (const auto& s : out) {
        if (!is_power_of_two(s.size()) || s.size() < 2) {
            throw SchemaError("spectrum '" + s.id + "' has length " + std::to_string(s.size()) +
                              ", not a power of 2");
        }
    }
    return out;
}

void write_group_spectra_csv(std::ostream& out, std::span<const GroupSpectrum> groups) {
    out << "group_label,c,mean_magnitude,n_pairs\n";
    for (const auto& g : groups) {
        for (std::size_t c = 0; c < g.mean_magnitudes.size(); ++c) {
            out << g.label << ',' << c << ',' << csv::format_double(g.mean_magnitudes[c]) << ',' << g.n_pairs
                << '\n';
        }
    }
}

void write_group_acf_csv(std::ostream& out, std::span<const GroupAcf> groups) {
    out << "group_label,k,mean_r,n_pairs\n";
    for (const auto& g : groups) {
        for (std::size_t k = 0; k < g.mean_coefficients.size(); ++k) {
            out << g.label << ',' << k << ',' << csv::format_double(g.mean_coefficients[k]) << ',' << g.n_series
                << '\n';
        }
    }
}

}  // namespace encounterlens
