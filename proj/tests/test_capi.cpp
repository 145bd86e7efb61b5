#include "stokesvem/stokesvem.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

// Patch pair for k = 2: u = (x^2, -2xy), p = x - y, f = (-nu - 1, 1).
void patch_u(double x, double y, void*, double out[2]) {
  out[0] = x * x;
  out[1] = -2.0 * x * y;
}
void patch_grad(double x, double y, void*, double out[4]) {
  out[0] = 2.0 * x;
  out[1] = 0.0;
  out[2] = -2.0 * y;
  out[3] = -2.0 * x;
}
double patch_p(double x, double y, void*) { return x - y; }
void patch_f(double, double, void* ctx, double out[2]) {
  const double nu = *static_cast<double*>(ctx);
  out[0] = -nu - 1.0;
  out[1] = 1.0;
}

} // namespace

TEST_CASE("status strings and errors") {
  CHECK(std::strlen(svem_version()) > 0);
  CHECK(std::string(svem_status_string(SVEM_OK)) == "ok");
  svem_mesh* m = nullptr;
  CHECK(svem_mesh_generate(SVEM_MESH_TRIANGLES, 0, 0, 0, 1, 1, &m) == SVEM_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::strlen(svem_last_error()) > 0);
  CHECK(svem_mesh_load("/nonexistent/mesh.json", &m) == SVEM_ERR_IO);
  CHECK(svem_mesh_generate(SVEM_MESH_TRIANGLES, 2, 0, 0, 1, 1, nullptr) == SVEM_ERR_INVALID_ARGUMENT);
  REQUIRE(svem_mesh_generate(SVEM_MESH_TRIANGLES, 2, 0, 0, 1, 1, &m) == SVEM_OK);
  CHECK(std::string(svem_last_error()).empty());
  svem_mesh_free(m);
  svem_mesh_free(nullptr);
}

TEST_CASE("mesh creation, info and file round trip") {
  const double xy[] = {0, 0, 1, 0, 1, 1, 0, 1};
  const int offsets[] = {0, 3, 6};
  const int idx[] = {0, 1, 2, 0, 2, 3};
  svem_mesh* m = nullptr;
  REQUIRE(svem_mesh_create(xy, 4, offsets, idx, 2, &m) == SVEM_OK);
  int nv = 0, ne = 0, nc = 0;
  double h = 0.0, area = 0.0;
  REQUIRE(svem_mesh_info(m, &nv, &ne, &nc, &h, &area) == SVEM_OK);
  CHECK(nv == 4);
  CHECK(ne == 5);
  CHECK(nc == 2);
  CHECK(std::abs(h - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(area - 1.0) < 1e-14);

  const std::string path = (std::filesystem::temp_directory_path() / "svem_capi_mesh.json").string();
  REQUIRE(svem_mesh_save(m, path.c_str()) == SVEM_OK);
  svem_mesh* back = nullptr;
  REQUIRE(svem_mesh_load(path.c_str(), &back) == SVEM_OK);
  CHECK(svem_mesh_warning_count(back) == 0);
  int nc2 = 0;
  svem_mesh_info(back, nullptr, nullptr, &nc2, nullptr, nullptr);
  CHECK(nc2 == 2);
  svem_mesh_free(back);
  svem_mesh_free(m);

  // Clockwise cell: loads with a warning.
  {
    std::ofstream out(path);
    out << R"({"vertices": [[0,0],[1,0],[1,1],[0,1]], "cells": [[0,3,2,1]]})";
  }
  REQUIRE(svem_mesh_load(path.c_str(), &back) == SVEM_OK);
  CHECK(svem_mesh_warning_count(back) == 1);
  CHECK(svem_mesh_warning(back, 0) != nullptr);
  CHECK(svem_mesh_warning(back, 1) == nullptr);
  svem_mesh_free(back);

  // Duplicate vertex: validation error.
  {
    std::ofstream out(path);
    out << R"({"vertices": [[0,0],[1,0],[1,1],[0,1]], "cells": [[0,1,1,2]]})";
  }
  CHECK(svem_mesh_load(path.c_str(), &back) == SVEM_ERR_VALIDATION);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK(svem_mesh_load(path.c_str(), &back) == SVEM_ERR_PARSE);
  std::filesystem::remove(path);
}

TEST_CASE("solve a polynomial patch problem through the C interface") {
  svem_mesh* m = nullptr;
  REQUIRE(svem_mesh_generate(SVEM_MESH_HEXAGONS, 3, 0, 0, 1, 1, &m) == SVEM_OK);
  double nu = 1.5;
  for (svem_method method : {SVEM_METHOD_STANDARD, SVEM_METHOD_ROBUST, SVEM_METHOD_REDUCED}) {
    svem_problem prob = svem_problem_default();
    prob.nu = nu;
    prob.method = method;
    prob.load = patch_f;
    prob.load_ctx = &nu;
    prob.dirichlet = patch_u;
    svem_solution* s = nullptr;
    REQUIRE(svem_solve(m, &prob, &s) == SVEM_OK);
    double eu = 1, ee = 1, ep = 1;
    REQUIRE(svem_solution_errors(s, patch_u, patch_grad, patch_p, nullptr, &eu, &ee, &ep) == SVEM_OK);
    CHECK(eu < 1e-9);
    CHECK(ee < 1e-9);
    CHECK(ep < 1e-9);
    double vel[2] = {0, 0}, p = 0;
    REQUIRE(svem_solution_eval(s, 0, 0.05, 0.05, vel, &p) == SVEM_OK);
    CHECK(svem_solution_eval(s, -1, 0, 0, vel, &p) == SVEM_ERR_INVALID_ARGUMENT);
    const int n = svem_solution_num_dofs(s);
    std::vector<double> buf(n);
    CHECK(svem_solution_velocity_dofs(s, buf.data(), n) == SVEM_OK);
    CHECK(svem_solution_velocity_dofs(s, buf.data(), n - 1) == SVEM_ERR_INVALID_ARGUMENT);
    double mean = 0;
    CHECK(svem_solution_pressure_mean(s, 0, &mean) == SVEM_OK);
    CHECK(svem_solution_residual(s) < 1e-8);
    svem_solution_free(s);
  }
  svem_problem bad = svem_problem_default();
  bad.k = 1;
  svem_solution* s = nullptr;
  CHECK(svem_solve(m, &bad, &s) == SVEM_ERR_INVALID_ARGUMENT);
  svem_mesh_free(m);
}

TEST_CASE("example runner, table, csv and check") {
  svem_example_config cfg = svem_example_default();
  cfg.example = "noflow";
  cfg.method = SVEM_METHOD_ROBUST;
  cfg.levels = 1;
  const double ra[] = {1.0, 1e6};
  cfg.ra = ra;
  cfg.num_ra = 2;
  svem_report* r = nullptr;
  REQUIRE(svem_run_example(&cfg, &r) == SVEM_OK);
  CHECK(svem_report_num_rows(r) == 2);
  int cells = 0;
  double h, eu, ee, ep, epr, rav;
  REQUIRE(svem_report_row(r, 1, &cells, &h, &eu, &ee, &ep, &epr, &rav) == SVEM_OK);
  CHECK(cells == 32);
  CHECK(rav == 1e6);
  CHECK(ee < 1e-7);
  CHECK(std::isnan(epr));
  CHECK(svem_report_row(r, 2, &cells, &h, &eu, &ee, &ep, &epr, &rav) == SVEM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(svem_report_table(r)).find("Ra = 1e+06") != std::string::npos);
  int passed = 0;
  const char* msg = nullptr;
  REQUIRE(svem_report_check(r, &passed, &msg) == SVEM_OK);
  CHECK(passed == 1);
  CHECK(msg != nullptr);
  const std::string path = (std::filesystem::temp_directory_path() / "svem_capi.csv").string();
  REQUIRE(svem_report_write_csv(r, path.c_str()) == SVEM_OK);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("method,k,level,cells,h,", 0) == 0);
  std::filesystem::remove(path);
  svem_report_free(r);

  cfg.example = "unknown";
  CHECK(svem_run_example(&cfg, &r) == SVEM_ERR_INVALID_ARGUMENT);
}
