// Command-line driver over the C API.
#include "stokesvem/stokesvem.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

int report_error(svem_status st) {
  std::fprintf(stderr, "stokesvem: %s: %s\n", svem_status_string(st), svem_last_error());
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divergence-free virtual element Stokes solver on polygonal meshes"};
  app.set_version_flag("--version", svem_version());

  std::string example = "lshape";
  std::string method = "standard";
  std::string mesh = "tri";
  std::string out;
  std::string mesh_file;
  std::vector<double> ra{1.0};
  int k = 2;
  int levels = 4;
  double nu = 1.0;
  bool check = false;
  bool iterative = false;
  bool quiet = false;

  app.add_option("--example", example, "noflow | lshape | patch | custom")
      ->check(CLI::IsMember({"noflow", "lshape", "patch", "custom"}))
      ->capture_default_str();
  app.add_option("--method", method, "standard | robust | reduced")
      ->check(CLI::IsMember({"standard", "robust", "reduced"}))
      ->capture_default_str();
  app.add_option("--k", k, "polynomial degree")->check(CLI::Range(2, 4))->capture_default_str();
  app.add_option("--levels", levels, "number of refinement levels")->check(CLI::Range(1, 8))->capture_default_str();
  app.add_option("--ra", ra, "comma-separated Rayleigh-type load scales (noflow)")->delimiter(',');
  app.add_option("--mesh", mesh, "tri | hex")->check(CLI::IsMember({"tri", "hex"}))->capture_default_str();
  app.add_option("--out", out, "CSV output path");
  app.add_option("--mesh-file", mesh_file, "JSON mesh for the custom example")->check(CLI::ExistingFile);
  app.add_option("--nu", nu, "viscosity")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--check", check, "run acceptance checks; exit 2 on failure");
  app.add_flag("--iterative", iterative, "preconditioned MINRES instead of sparse LU");
  app.add_flag("-q,--quiet", quiet, "do not print the table");
  CLI11_PARSE(app, argc, argv);

  svem_example_config cfg = svem_example_default();
  cfg.example = example.c_str();
  cfg.method = method == "robust" ? SVEM_METHOD_ROBUST : method == "reduced" ? SVEM_METHOD_REDUCED : SVEM_METHOD_STANDARD;
  cfg.k = k;
  cfg.levels = levels;
  cfg.ra = ra.data();
  cfg.num_ra = static_cast<int>(ra.size());
  cfg.mesh_hexagons = mesh == "hex";
  cfg.mesh_file = mesh_file.empty() ? nullptr : mesh_file.c_str();
  cfg.nu = nu;
  cfg.iterative = iterative;

  svem_report* report = nullptr;
  if (svem_status st = svem_run_example(&cfg, &report); st != SVEM_OK) return report_error(st);

  int code = 0;
  if (!quiet) std::fputs(svem_report_table(report), stdout);
  if (!out.empty()) {
    if (svem_status st = svem_report_write_csv(report, out.c_str()); st != SVEM_OK) {
      svem_report_free(report);
      return report_error(st);
    }
  }
  if (check) {
    int passed = 0;
    const char* messages = nullptr;
    if (svem_status st = svem_report_check(report, &passed, &messages); st != SVEM_OK) {
      svem_report_free(report);
      return report_error(st);
    }
    std::fputs(messages, stdout);
    std::printf("check: %s\n", passed ? "PASS" : "FAIL");
    if (!passed) code = 2;
  }
  svem_report_free(report);
  return code;
}
