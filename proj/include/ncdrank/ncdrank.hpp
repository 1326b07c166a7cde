#pragma once

// Umbrella header.
#include "ncdrank/decomposition.hpp"
#include "ncdrank/error.hpp"
#include "ncdrank/graph.hpp"
#include "ncdrank/hyperlink.hpp"
#include "ncdrank/matrix.hpp"
#include "ncdrank/ranker.hpp"
#include "ncdrank/spectra.hpp"
