#include <pybind11/pybind11.h>
PYBIND11_MODULE(_chronospike, m) { m.doc() = "stub"; }
