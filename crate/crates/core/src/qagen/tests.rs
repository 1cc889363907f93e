use super::*;
use crate::interchange::{ObjectClass, ObjectRecord, Sample, Source};
use crate::synth::{random_scene, synth_manifest, Leg, Motion, MotionScript};

fn manifest(domain: Domain, objects: Vec<(&str, Vec<[f64; 3]>)>) -> SceneManifest {
    let n = objects.iter().map(|(_, p)| p.len()).max().unwrap_or(2);
    SceneManifest {
        scene_id: "s1".into(),
        domain,
        duration: (n - 1) as f64 * 0.5,
        frame_timestamps: (0..n).map(|i| i as f64 * 0.5).collect(),
        objects: objects
            .into_iter()
            .map(|(id, pts)| ObjectRecord {
                object_id: id.into(),
                class: ObjectClass::Car,
                samples: pts
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| Sample { t: i as f64 * 0.5, center: p.into() })
                    .collect(),
                boxes2d: None,
                confidence: 1.0,
                source: Source::Lidar,
            })
            .collect(),
    }
}

fn line(n: usize, v: [f64; 2]) -> Vec<[f64; 3]> {
    (0..n).map(|i| [v[0] * i as f64, v[1] * i as f64, 0.0]).collect()
}

#[test]
fn common_prompt_exact() {
    let p = common_prompt(10.0, &[0.0, 5.0], &[Color::Red]).unwrap();
    assert_eq!(
        p,
        "The video lasts for 10.0 seconds, and 2 frames are uniformly sampled from it. \
         These frames are located at 0.0, 5.0 seconds. \
         There are 1 objects annotated with red bounding boxes in the video."
    );
    let p3 = common_prompt(4.0, &[0.0], &[Color::Red, Color::Green, Color::Blue]).unwrap();
    assert!(p3.ends_with("There are 3 objects annotated with red, green and blue bounding boxes in the video."));
    assert!(common_prompt(10.0, &[0.0], &[]).is_err());
}

#[test]
fn answer_formats() {
    assert_eq!(answer_text(&Answer::Meters(12.34)), "Answer: 12.3 meters");
    assert_eq!(answer_text(&Answer::Kmh(18.0)), "Answer: 18.0 km/h");
    assert_eq!(answer_text(&Answer::Clock(3)), "Answer: 3 o'clock");
    assert_eq!(answer_text(&Answer::Interval([2.0, 5.5])), "Answer: from 2.0 to 5.5 seconds");
    assert_eq!(answer_text(&Answer::Choice(Color::Blue)), "Answer: the blue object");
    assert_eq!(answer_text(&Answer::Boolean(false)), "Answer: no");
}

#[test]
fn stationary_object_gets_no_distance_or_speed() {
    let m = manifest(Domain::Driving, vec![("still", vec![[1.0, 1.0, 0.0]; 10])]);
    let items = generate(&m, 0, &GenSettings::default()).unwrap();
    assert!(items.iter().all(|i| !matches!(i.task, Task::TraveledDistance | Task::TravelingSpeed)));
    assert!(items.is_empty());
}

#[test]
fn sports_has_no_direction_items() {
    let objs = vec![("a", line(12, [2.0, 0.0])), ("b", line(12, [0.0, 1.0]))];
    let sports = generate(&manifest(Domain::Sports, objs.clone()), 3, &GenSettings::default()).unwrap();
    assert!(!sports.is_empty());
    assert!(sports.iter().all(|i| !i.task.is_direction()));
    let driving = generate(&manifest(Domain::Driving, objs), 3, &GenSettings::default()).unwrap();
    assert!(driving.iter().any(|i| i.task.is_direction()));
}

#[test]
fn deterministic_for_seed() {
    let m = manifest(Domain::General, vec![("a", line(12, [2.0, 0.0])), ("b", line(12, [0.0, 1.0]))]);
    let s = GenSettings::default();
    assert_eq!(generate(&m, 7, &s).unwrap(), generate(&m, 7, &s).unwrap());
}

#[test]
fn straight_line_answers() {
    // 2 m per 0.5 s step along +x: 14.4 km/h, heading stays at 12
    let m = manifest(Domain::Driving, vec![("a", line(12, [1.0, 0.0]))]);
    let items = generate(&m, 1, &GenSettings::default()).unwrap();
    for item in &items {
        match (&item.answer_typed, item.params.window) {
            (Answer::Meters(d), Some([s, e])) => assert!((d - 2.0 * (e - s)).abs() < 1e-12),
            (Answer::Kmh(v), _) => assert!((v - 7.2).abs() < 1e-9),
            (Answer::Clock(h), _) => assert_eq!(*h, 12),
            (Answer::Interval(iv), _) => assert_eq!(*iv, [0.0, 5.5]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(item.question.starts_with("The video lasts for 5.5 seconds"));
        assert!(!item.question.contains('['));
    }
    assert_eq!(items.len(), 4);
}

#[test]
fn comparison_answers_follow_polarity_and_swap() {
    let m = manifest(Domain::Driving, vec![("fast", line(12, [3.0, 0.0])), ("slow", line(12, [0.0, 1.0]))]);
    let items = generate(&m, 5, &GenSettings::default()).unwrap();
    let colors = assign_colors(&m);
    for item in items.iter().filter(|i| matches!(i.task, Task::DistanceComparison | Task::SpeedComparison)) {
        let want = match item.params.polarity.unwrap() {
            Polarity::Greater => colors["fast"],
            Polarity::Less => colors["slow"],
        };
        assert_eq!(item.answer_typed, Answer::Choice(want), "{}", item.question);
    }
    let dir = items.iter().find(|i| i.task == Task::DirectionComparison).unwrap();
    assert_eq!(dir.answer_typed, Answer::Boolean(false));
}

#[test]
fn turn_yields_direction_timestamp() {
    let legs = vec![
        Leg { duration: 3.0, velocity: [0.0, 2.0, 0.0] },
        Leg { duration: 3.0, velocity: [2.0, 0.0, 0.0] },
    ];
    let s = MotionScript::new("t", ObjectClass::Car, Motion::Piecewise { origin: [0.0; 3], legs }, 6.0);
    let scene = synth_manifest("turn", Domain::Driving, 6.0, &[s], 0.5).unwrap();
    let items = generate(&scene.manifest, 2, &GenSettings::default()).unwrap();
    let last = items.iter().find(|i| i.task == Task::MovementDirection).unwrap();
    assert_eq!(last.answer_typed, Answer::Clock(3));
    let ts = items.iter().find(|i| i.task == Task::DirectionTimestamp).unwrap();
    let want = if ts.params.hour == Some(3) { [3.0, 6.0] } else { [0.0, 3.0] };
    assert_eq!(ts.answer_typed, Answer::Interval(want));
}

#[test]
fn at_most_six_objects_colored() {
    let objs: Vec<(&str, Vec<[f64; 3]>)> = ["a", "b", "c", "d", "e", "f", "g"]
        .into_iter()
        .enumerate()
        .map(|(k, id)| (id, line(8, [1.0 + k as f64, 0.0])))
        .collect();
    let m = manifest(Domain::Driving, objs);
    let items = generate(&m, 0, &GenSettings::default()).unwrap();
    assert!(items.iter().all(|i| !i.params.objects.contains(&"g".to_string())));
    assert_eq!(items[0].object_colors.len(), 6);
}

#[test]
fn rederive_reproduces_random_scenes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = GenSettings::default();
    for k in 0..20 {
        let scene = random_scene(&mut rng, &format!("r{k}"), Domain::Driving);
        for item in generate(&scene.manifest, 9, &s).unwrap() {
            assert_eq!(rederive(&item, &scene.manifest, &s).unwrap(), item.answer_typed);
        }
    }
}

#[test]
fn dataset_round_trip_and_order() {
    let dir = tempfile::tempdir().unwrap();
    let m = manifest(Domain::Driving, vec![("a", line(12, [1.0, 0.5])), ("b", line(12, [0.2, 2.0]))]);
    let mut items = generate(&m, 0, &GenSettings::default()).unwrap();
    items.reverse();
    let p = dir.path().join("qa.jsonl");
    write_dataset(&items, &p).unwrap();
    let back = read_dataset(&p).unwrap();
    sort_items(&mut items);
    assert_eq!(back, items);
    write_dataset(&[], &p).unwrap();
    assert_eq!(std::fs::read(&p).unwrap().len(), 0);
}
