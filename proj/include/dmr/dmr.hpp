#pragma once

#include "dmr/balancer.hpp"
#include "dmr/cli.hpp"
#include "dmr/cloud.hpp"
#include "dmr/dataset.hpp"
#include "dmr/density.hpp"
#include "dmr/evaluate.hpp"
#include "dmr/feature.hpp"
#include "dmr/inference.hpp"
#include "dmr/learner.hpp"
#include "dmr/megaclouds.hpp"
#include "dmr/model.hpp"
#include "dmr/model_io.hpp"
#include "dmr/pipeline.hpp"
#include "dmr/rng.hpp"
#include "dmr/rules.hpp"
#include "dmr/stats.hpp"
