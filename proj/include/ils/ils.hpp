#pragma once

#include "ils/concept_store.hpp"
#include "ils/csd.hpp"
#include "ils/errors.hpp"
#include "ils/ilt_io.hpp"
#include "ils/learning.hpp"
#include "ils/retrieval.hpp"
#include "ils/tensor.hpp"
