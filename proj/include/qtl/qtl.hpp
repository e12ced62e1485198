#pragma once

// Umbrella header.

#include "qtl/errors.hpp"
#include "qtl/qmath.hpp"
#include "qtl/rng.hpp"
#include "qtl/parallel.hpp"
#include "qtl/embedding.hpp"
#include "qtl/tasks.hpp"
#include "qtl/classifier.hpp"
#include "qtl/embedding_table.hpp"
#include "qtl/divergence.hpp"
#include "qtl/complexity.hpp"
#include "qtl/pipeline.hpp"
#include "qtl/config.hpp"
#include "qtl/presets.hpp"
#include "qtl/report.hpp"
#include "qtl/experiments.hpp"
#include "qtl/random_objects.hpp"
#include "qtl/validate.hpp"
