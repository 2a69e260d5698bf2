#include <algorithm>
#include <filesystem>
#include <sstream>

#include "qrelay/errors.hpp"
#include "qrelay/experiment.hpp"

namespace qrelay {

std::string render_report(const RunManifest& manifest) {
  if (manifest.outputs.empty())
    throw Error("no outputs: manifest for '" + manifest.command + "' lists no data files");

  const std::filesystem::path dir(manifest.output_dir);
  std::vector<std::string> missing;
  for (const auto& o : manifest.outputs)
    if (!std::filesystem::exists(dir / o.path)) missing.push_back((dir / o.path).string());
  if (!missing.empty()) {
    std::string msg = "missing output files:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw Error(msg);
  }

  std::size_t width = 8;
  for (const auto& [k, _] : manifest.summary) width = std::max(width, k.size());

  std::ostringstream os;
  os << "qrelay " << manifest.version << "  command: " << manifest.command << "  (" << manifest.wall_seconds
     << " s)\n\n";
  os << std::string(width, '-') << "  " << std::string(24, '-') << '\n';
  for (const auto& [k, v] : manifest.summary) os << k << std::string(width - k.size(), ' ') << "  " << v << '\n';
  os << std::string(width, '-') << "  " << std::string(24, '-') << '\n';
  os << "\ndata files (comma separated, header row; gnuplot: set datafile separator ','):\n";
  for (const auto& o : manifest.outputs) os << "  " << (dir / o.path).string() << "  sha256:" << o.sha256 << '\n';
  return os.str();
}

}  // namespace qrelay
