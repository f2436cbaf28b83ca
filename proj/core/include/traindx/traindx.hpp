#pragma once

// Umbrella header for the whole diagnosis library.

#include "traindx/corpus.hpp"
#include "traindx/dataset.hpp"
#include "traindx/detectors.hpp"
#include "traindx/diagnosis.hpp"
#include "traindx/model.hpp"
#include "traindx/monitor.hpp"
#include "traindx/optimizer.hpp"
#include "traindx/rng.hpp"
#include "traindx/serialize.hpp"
#include "traindx/symptoms.hpp"
#include "traindx/tensor.hpp"
#include "traindx/train.hpp"
