#ifndef RCEXT_IO_HPP
#define RCEXT_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "rcext/estimate.hpp"
#include "rcext/grid.hpp"
#include "rcext/sequence.hpp"
#include "rcext/solve.hpp"
#include "rcext/weight.hpp"
#include "rcext/wiener.hpp"

namespace rcext {

/// Raised by the readers on malformed input.
class FileFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Coefficient/covariance text format: header "d n1 ... nd" (full box index
// set), then one line "k1 ... kd re im" per exponent in lexicographic order.
// Writers emit 17 significant digits.
void write_sequence(std::ostream& os, const HermitianSeq& seq);
void write_sequence_file(const std::string& path, const HermitianSeq& seq);
HermitianSeq read_sequence(std::istream& is);
HermitianSeq read_sequence_file(const std::string& path);

// Grid field export: CSV "theta1,...,thetad,value" in row-major node order,
// and a little-endian binary dump with a dims header.
void write_field_csv(std::ostream& os, const GridField& field);
void write_field_csv_file(const std::string& path, const GridField& field);
void write_field_binary_file(const std::string& path, const GridField& field);
GridField read_field_binary_file(const std::string& path);

// Data record tensor: text header "d N1 ... Nd", then one value per line
// ("re" or "re im"), row-major; binary alternative with a magic tag.
// Readers sniff the format.
void write_record_text(std::ostream& os, const DataRecord& rec);
void write_record_file(const std::string& path, const DataRecord& rec, bool binary = false);
DataRecord read_record_file(const std::string& path);

// Weight specification: "scalar lambda" or "matrix n" followed by n rows of
// n "re im" pairs (lexicographic coefficient order).
void write_weight(std::ostream& os, const WeightMatrix& w, std::optional<double> scalar);
WeightMatrix read_weight(std::istream& is, const IndexSet& set);
WeightMatrix read_weight_file(const std::string& path, const IndexSet& set);

// Solution file: sections [meta], [weight], [q], [r], [c_hat], [atoms],
// [kkt]. Re-readable; convert-weight consumes it.
void write_solution_file(const std::string& path, const DualSolution& sol,
                         const WeightMatrix* w, std::optional<double> scalar_weight);
struct SolutionFile {
    DualSolution solution;
    std::optional<WeightMatrix> weight;
    std::optional<double> scalar_weight;
};
SolutionFile read_solution_file(const std::string& path);

// Wiener model file: threshold, spectrum coefficients and filter.
void write_model_file(const std::string& path, const WienerModel& model);
WienerModel read_model_file(const std::string& path);

// Portable graymap/bitmap. P5 reads return gray levels in [0,255]; P4 reads
// return 0/1. write_image_p4 expects a binary record; write_image_p5 scales
// [0,1] to gray levels.
DataRecord read_image_file(const std::string& path);
void write_image_p4_file(const std::string& path, const DataRecord& binary);
void write_image_p5_file(const std::string& path, const DataRecord& values);

/// Grayscale to binary by thresholding at the midpoint of min and max.
DataRecord binarize_midpoint(const DataRecord& gray);

}  // namespace rcext

#endif
