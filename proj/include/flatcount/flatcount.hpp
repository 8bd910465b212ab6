#pragma once

#include "catalog.hpp"
#include "counting.hpp"
#include "delaunay.hpp"
#include "enumerate.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "geometry.hpp"
#include "origami.hpp"
#include "parallel.hpp"
#include "report_io.hpp"
#include "sl2.hpp"
#include "surface.hpp"
#include "surface_io.hpp"
