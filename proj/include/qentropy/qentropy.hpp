#pragma once

#include "qentropy/bftree.hpp"
#include "qentropy/classifier.hpp"
#include "qentropy/cross_validation.hpp"
#include "qentropy/entropy.hpp"
#include "qentropy/error.hpp"
#include "qentropy/features.hpp"
#include "qentropy/folds.hpp"
#include "qentropy/image.hpp"
#include "qentropy/knn.hpp"
#include "qentropy/model_file.hpp"
#include "qentropy/parallel.hpp"
#include "qentropy/pipeline.hpp"
#include "qentropy/random.hpp"
#include "qentropy/selection.hpp"
#include "qentropy/svm.hpp"
#include "qentropy/synthetic.hpp"
