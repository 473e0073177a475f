//! Image-processing demo: crop → denoise → resample as a reusable
//! `processing` pipe, nested inside an `experiment` pipe that adds edge
//! enhancement.

use std::path::{Path, PathBuf};

use clap::Parser;

use crate::contract::{ArgSpec, InfoFn, ParamSpec, Relation};
use crate::error::{Error, Result};
use crate::imaging::{self, GrayImage, IMAGE_KIND};
use crate::pipeline::{compose, describe, run_with, ArgNamespace, Pipe, RunOptions, Unit};
use crate::predicates;
use crate::typeexpr::TypeExpr;
use crate::value::Value;

pub const PROCESSED_FILE: &str = "processed.pgm";
pub const FINAL_FILE: &str = "final.pgm";

/// Qualified name of the step whose output is the intermediate image.
pub const INTERMEDIATE_STEP: &str = "processing.resample";

fn image_tp() -> TypeExpr {
    TypeExpr::object(IMAGE_KIND)
}

fn box_of(v: &Value) -> Result<[i64; 4], String> {
    let items = v.as_items().ok_or("box must be a tuple")?;
    let nums: Vec<i64> = items.iter().filter_map(Value::as_int).collect();
    nums.try_into().map_err(|_| "box must hold four integers".to_owned())
}

fn inside_image() -> Relation {
    Relation::new("inside_image", |b, data| {
        let [x0, y0, w, h] = box_of(b)?;
        let img = GrayImage::from_value(data).map_err(|e| e.to_string())?;
        Ok(x0 >= 0 && y0 >= 0 && w >= 1 && h >= 1 && x0 + w <= img.width() as i64 && y0 + h <= img.height() as i64)
    })
}

fn image_step<F>(name: &str, params: Vec<ParamSpec>, body: F) -> InfoFn
where
    F: Fn(&GrayImage, &crate::contract::BoundArgs) -> Result<GrayImage> + Send + Sync + 'static,
{
    let mut all = vec![ParamSpec::positional(crate::contract::DATA)];
    all.extend(params);
    InfoFn::with_params(name, all, move |a| {
        let img = GrayImage::from_value(a.data())?;
        body(img, a).map(GrayImage::to_value)
    })
    .expect("static signature")
    .attach_flow(image_tp(), image_tp())
}

/// `crop(data, box)`; `box` is `(x0, y0, w, h)` and must lie inside `data`.
pub fn crop_fn() -> InfoFn {
    let quad = TypeExpr::fixed_seq(vec![TypeExpr::integer(); 4]).expect("non-empty");
    image_step("crop", vec![ParamSpec::positional("box")], |img, a| {
        let [x0, y0, w, h] = box_of(a.require("box")?).map_err(Error::Config)?;
        imaging::crop(img, x0 as usize, y0 as usize, w as usize, h as usize)
    })
    .configure_args([("box", ArgSpec::new(quad).with_relation(inside_image()))])
    .expect("box is declared")
    .attach_attributes([("doc", "Copy the (x0, y0, w, h) rectangle.")])
}

/// `denoise(data, kernel="gaussian3")`; kernel is `mean` or `gaussian3`.
pub fn denoise_fn() -> InfoFn {
    image_step("denoise", vec![ParamSpec::optional("kernel", "gaussian3")], |img, a| {
        let k = a.require("kernel")?.as_text().unwrap_or_default();
        imaging::denoise(img, k)
    })
    .configure_args([("kernel", ArgSpec::new(TypeExpr::text()))])
    .expect("kernel is declared")
    .attach_attributes([("doc", "3x3 smoothing with replicate padding.")])
}

/// `resample(data, scale=1.0)`; nearest neighbour, `scale` must be positive.
pub fn resample_fn() -> InfoFn {
    image_step("resample", vec![ParamSpec::optional("scale", 1.0)], |img, a| {
        let s = a.require("scale")?.as_f64().unwrap_or(f64::NAN);
        imaging::resample(img, s)
    })
    .configure_args([("scale", ArgSpec::new(predicates::positive()))])
    .expect("scale is declared")
    .attach_attributes([("doc", "Nearest-neighbour resampling.")])
}

/// `edge(data, method="prewitt")`; method is `prewitt` or `laplacian`.
pub fn edge_fn() -> InfoFn {
    image_step("edge", vec![ParamSpec::optional("method", "prewitt")], |img, a| {
        let m = a.require("method")?.as_text().unwrap_or_default();
        imaging::edge(img, m)
    })
    .configure_args([("method", ArgSpec::new(TypeExpr::text()))])
    .expect("method is declared")
    .attach_attributes([("doc", "Edge enhancement.")])
}

pub fn processing_pipe() -> Result<Pipe> {
    compose(
        "processing",
        vec![
            Unit::new("crop", crop_fn())?.into(),
            Unit::new("denoise", denoise_fn())?.into(),
            Unit::new("resample", resample_fn())?.into(),
        ],
    )
}

pub fn experiment_pipe(processing: Pipe) -> Result<Pipe> {
    compose(
        "experiment",
        vec![processing.into(), Unit::new("edge", edge_fn())?.into()],
    )
}

/// A step that turns an image into a histogram, which no image step accepts.
pub fn histogram_fn() -> InfoFn {
    InfoFn::with_params("histogram", vec![ParamSpec::positional(crate::contract::DATA)], |a| {
        let img = GrayImage::from_value(a.data())?;
        let mut h = vec![0i64; 256];
        for &p in img.pixels() {
            h[p as usize] += 1;
        }
        Ok(Value::list(h))
    })
    .expect("static signature")
    .attach_flow(image_tp(), TypeExpr::seq(TypeExpr::integer()))
}

/// Experiment pipe with a histogram step wedged in before `edge`.
pub fn broken_experiment_pipe() -> Result<Pipe> {
    compose(
        "experiment",
        vec![
            processing_pipe()?.into(),
            Unit::new("histogram", histogram_fn())?.into(),
            Unit::new("edge", edge_fn())?.into(),
        ],
    )
}

/// Pipeline parameters. The defaults are this demo's own choice.
#[derive(Clone, Debug, PartialEq)]
pub struct DemoParams {
    pub crop_box: [i64; 4],
    pub denoise: String,
    pub scale: f64,
    pub edge: String,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams {
            crop_box: [8, 8, 48, 48],
            denoise: "gaussian3".into(),
            scale: 2.0,
            edge: "prewitt".into(),
        }
    }
}

impl DemoParams {
    /// Dot-qualified argument namespace for the experiment pipe.
    pub fn namespace(&self) -> ArgNamespace {
        ArgNamespace::new()
            .with("processing.crop.box", Value::tuple(self.crop_box))
            .with("processing.denoise.kernel", self.denoise.as_str())
            .with("processing.resample.scale", self.scale)
            .with("edge.method", self.edge.as_str())
    }
}

/// Intermediate (after `processing`) and final images.
#[derive(Clone, Debug, PartialEq)]
pub struct DemoOutput {
    pub processed: GrayImage,
    pub edges: GrayImage,
}

pub fn run_demo(pipe: &Pipe, img: GrayImage, params: &DemoParams) -> Result<DemoOutput> {
    let opts = RunOptions {
        timing: false,
        keep_outputs: true,
    };
    let trace = run_with(pipe, img.to_value(), &params.namespace(), opts)?;
    let processed = trace
        .output_of(INTERMEDIATE_STEP)
        .ok_or_else(|| Error::Config(format!("no output recorded for {INTERMEDIATE_STEP}")))?;
    Ok(DemoOutput {
        processed: GrayImage::from_value(processed)?.clone(),
        edges: GrayImage::from_value(&trace.output)?.clone(),
    })
}

fn parse_box(s: &str) -> Result<[i64; 4], String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| "expected x0,y0,w,h".into())
}

/// Runs the crop/denoise/resample/edge pipeline on a binary PGM.
#[derive(Parser, Debug)]
#[command(name = "infofn-demo", version)]
struct Cli {
    /// Input image (binary PGM, maxval 255).
    #[arg(long = "in", value_name = "PATH", required_unless_present = "dump_pipe")]
    input: Option<PathBuf>,
    /// Directory receiving processed.pgm and final.pgm.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Crop rectangle.
    #[arg(long = "box", value_name = "x0,y0,w,h", default_value = "8,8,48,48", value_parser = parse_box)]
    crop_box: [i64; 4],
    /// Smoothing kernel: mean or gaussian3.
    #[arg(long, default_value = "gaussian3")]
    denoise: String,
    /// Resampling factor.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    scale: f64,
    /// Edge method: prewitt or laplacian.
    #[arg(long, default_value = "prewitt")]
    edge: String,
    /// Print the experiment pipe and exit.
    #[arg(long)]
    dump_pipe: bool,
    #[arg(long, hide = true)]
    inject_incompatible: bool,
}

fn execute(cli: &Cli) -> Result<Option<String>> {
    let pipe = if cli.inject_incompatible {
        broken_experiment_pipe()?
    } else {
        experiment_pipe(processing_pipe()?)?
    };
    if cli.dump_pipe {
        return Ok(Some(describe(&pipe)));
    }
    let input = cli.input.as_deref().expect("clap requires --in");
    let img = imaging::load_pgm(input).map_err(|e| with_path(e, input))?;
    let params = DemoParams {
        crop_box: cli.crop_box,
        denoise: cli.denoise.clone(),
        scale: cli.scale,
        edge: cli.edge.clone(),
    };
    let out = run_demo(&pipe, img, &params)?;
    std::fs::create_dir_all(&cli.out_dir)?;
    let processed = imaging::encode_pgm(&out.processed);
    let edges = imaging::encode_pgm(&out.edges);
    std::fs::write(cli.out_dir.join(PROCESSED_FILE), processed)?;
    std::fs::write(cli.out_dir.join(FINAL_FILE), edges)?;
    Ok(None)
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// CLI entry point. `argv[0]` is the program name. Returns the exit status.
pub fn demo_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(Some(text)) => {
            print!("{text}");
            0
        }
        Ok(None) => 0,
        Err(e) => {
            eprintln!("infofn-demo: {e}");
            1
        }
    }
}
