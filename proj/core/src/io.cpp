#include "slvst/io.hpp"

#include <charconv>
#include <fstream>

#include "slvst/errors.hpp"

namespace slvst {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& file, std::string_view text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot open '" + file.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw Error(ErrorCategory::kIo, "failed writing '" + file.string() + "'");
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw Error(ErrorCategory::kValidation, "CSV header and column count differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw Error(ErrorCategory::kValidation, "CSV columns differ in length");
  std::string s;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) s += ',';
    s += header[j];
  }
  s += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) s += ',';
      s += format_double(columns[j][i]);
    }
    s += '\n';
  }
  write_text(file, s);
}

void write_spectrum_csv(const Spectrum& spec, const std::filesystem::path& file) {
  write_csv(file, {"freq_mhz", "value"}, {spec.freq, spec.value});
}

void write_wsl_csv(const LadderPeaks& peaks, const std::filesystem::path& file) {
  write_csv(file, {"energy_mhz", "weight"}, {peaks.energies, peaks.weights});
}

void write_map_csv(const VstMap& map, const std::filesystem::path& matrix_file,
                   const std::filesystem::path& trajectories_file) {
  if (map.data.size() != map.v_axis.size())
    throw Error(ErrorCategory::kValidation, "map rows do not match the velocity axis");
  std::string s = "v_mps/freq_mhz";
  for (double f : map.f_axis) s += ',' + format_double(f);
  s += '\n';
  for (std::size_t i = 0; i < map.v_axis.size(); ++i) {
    if (map.data[i].size() != map.f_axis.size())
      throw Error(ErrorCategory::kValidation, "map columns do not match the frequency axis");
    s += format_double(map.v_axis[i]);
    for (double x : map.data[i]) s += ',' + format_double(x);
    s += '\n';
  }
  write_text(matrix_file, s);

  std::string t = "ladder_id,v_mps,energy_mhz\n";
  for (std::size_t id = 0; id < map.ladders.size(); ++id)
    for (const auto& p : map.ladders[id])
      t += std::to_string(id) + ',' + format_double(p.v) + ',' + format_double(p.e) + '\n';
  write_text(trajectories_file, t);
}

}  // namespace slvst
