#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "encounterlens/ids.hpp"

namespace encounterlens {

/**
 * Autocorrelation coefficients r_0..r_{T-1} of one series.
 *
 *   r_k = sum_{d=0}^{T-1-k} (x_d - mean)(x_{d+k} - mean) / sum_{d=0}^{T-1} (x_d - mean)^2
 *
 * i.e. the biased estimator: every lag shares the full-length denominator, so
 * |r_k| <= 1 and r_k decays linearly for a periodic input.
 */
struct AcfSeries {
    std::string id;
    std::vector<double> coefficients;
    double mean = 0.0;
    double variance = 0.0;  ///< population variance of the input
    /// Constant input: r_0 = 1 and r_k = 0 for k >= 1 by convention.
    bool degenerate = false;

    [[nodiscard]] std::size_t size() const noexcept { return coefficients.size(); }
};

/// |y_c| for c = 0..T-1, sampled at one value per `sampling` unit.
struct PowerSpectrum {
    std::string id;
    std::vector<double> magnitudes;
    BinUnit sampling = BinUnit::day;
    bool degenerate = false;

    [[nodiscard]] std::size_t size() const noexcept { return magnitudes.size(); }
    /// Component T/2, i.e. 0.5 cycles per sampling unit.
    [[nodiscard]] std::size_t nyquist_index() const noexcept { return magnitudes.size() / 2; }
    /// Cycles per sampling unit of component c.
    [[nodiscard]] double frequency(std::size_t c) const noexcept {
        return static_cast<double>(c) / static_cast<double>(magnitudes.size());
    }
};

/// Requires T >= 2 (ContractViolation otherwise).
[[nodiscard]] AcfSeries acf(std::span<const double> series, std::string id = {});

/// In-place iterative radix-2 forward DFT (e^{-2 pi i kn/N}). Size must be a power of two.
void fft_in_place(std::span<std::complex<double>> data);

/**
 * Magnitudes of y_c = sum_{k=1}^{T-1} r_k e^{-2 pi i k c / T}, computed with the
 * FFT on (0, r_1, ..., r_{T-1}). The lag-0 term is left out of the sum. T must
 * be a power of two (SchemaError). A degenerate ACF yields an all-zero,
 * degenerate spectrum.
 */
[[nodiscard]] PowerSpectrum power_spectrum(const AcfSeries& acf, BinUnit sampling = BinUnit::day);

/// Direct O(T^2) evaluation of the same sum, any T. Reference for power_spectrum.
[[nodiscard]] PowerSpectrum naive_dft(const AcfSeries& acf, BinUnit sampling = BinUnit::day);

/**
 * Divides every magnitude by sum_{c=1}^{T-1} |y_c|; component 0 is set to 0.
 * The result sums to 1 over c >= 1 and keeps the argmax. An all-zero input
 * (over c >= 1) comes back flagged degenerate.
 */
[[nodiscard]] PowerSpectrum normalize_spectrum(const PowerSpectrum& spectrum);

/// Per-component mean over a cohort. `empty()` marks a cohort with no usable spectra.
struct GroupSpectrum {
    std::string label;
    std::vector<double> mean_magnitudes;
    std::size_t n_pairs = 0;
    std::size_t n_excluded = 0;  ///< degenerate inputs skipped
    BinUnit sampling = BinUnit::day;

    [[nodiscard]] bool empty() const noexcept { return n_pairs == 0; }
};

/**
 * Arithmetic mean of the non-degenerate spectra, summed in input order.
 * All inputs must share T and sampling (ContractViolation otherwise).
 */
[[nodiscard]] GroupSpectrum group_average_spectrum(std::span<const PowerSpectrum> spectra, std::string label = {});

struct GroupAcf {
    std::string label;
    std::vector<double> mean_coefficients;
    std::size_t n_series = 0;
};

/// Mean autocoefficient per lag over non-degenerate inputs.
[[nodiscard]] GroupAcf group_average_acf(std::span<const AcfSeries> series, std::string label = {});

/// Index of the largest value in [lo, hi] (inclusive); ties resolve to the lowest index.
[[nodiscard]] std::size_t argmax_component(std::span<const double> magnitudes, std::size_t lo, std::size_t hi);

// id,c,magnitude,normalized_magnitude -- `normalized` must align with `raw`.
void write_spectra_csv(std::ostream& out, std::span<const PowerSpectrum> raw,
                       std::span<const PowerSpectrum> normalized);
/// Reads the magnitude column back into one spectrum per id (file order).
[[nodiscard]] std::vector<PowerSpectrum> read_spectra_csv(std::istream& in, BinUnit sampling);

void write_group_spectra_csv(std::ostream& out, std::span<const GroupSpectrum> groups);
void write_group_acf_csv(std::ostream& out, std::span<const GroupAcf> groups);

}  // namespace encounterlens
